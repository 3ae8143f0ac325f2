"""Seeded verification campaigns, threshold fixtures and flat-file datasets."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from ._config import DEFAULT_PRIME, audit_primes, check_prime
from .kernel_bundles import BasePointError, lemma3_hypothesis, restricted_kernel_splitting
from .koszul import (SectionRing, betti_table, check_NSp, embedding_certification,
                     ideal_generator_degrees, regularity)
from .models import Polarization, default_curve, parse_curve, parse_model
from .subsystems import (Complete, Constrained, Generic, SubsystemError, base_point_free_check,
                         lambda_dimension, make_subsystem, restriction_image_codim)

DEFAULT_CAP_SECONDS = 60.0


class RuntimeCapExceeded(RuntimeError):
    pass


class _Timer:
    def __init__(self, cap: float | None):
        self.cap = cap
        self.start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def check(self, stage: str):
        if self.cap is not None and self.elapsed > self.cap:
            raise RuntimeCapExceeded(f"cap of {self.cap:g} s exceeded during {stage}")


# --------------------------------------------------------------------------
# campaigns


@dataclass(frozen=True)
class Campaign:
    model: str
    curve: str | None = None
    trials: int = 50
    seed: int = 0
    codims: tuple[int, int] | None = None  # inclusive; defaults depend on the check
    check: str = "theorem13"  # theorem13 | corollary14
    p: int = 1
    window: int | None = None  # default t + 4 per trial
    prime: int = DEFAULT_PRIME
    cap_seconds: float | None = DEFAULT_CAP_SECONDS
    output: str | None = None
    jobs: int = 1
    include_timing: bool = False


@dataclass
class TrialRecord:
    index: int
    model: str
    curve: str
    prime: int
    seed: int
    subsystem: str
    t: int
    dim_v: int
    restriction_codim: int | None = None
    kernel_dim: int | None = None
    m: int | None = None
    hypothesis_applies: bool | None = None
    restricted_vanishing: bool | None = None
    splitting: list[int] | None = None
    nsp_holds: bool | None = None
    p: int = 1
    window: int | None = None
    offending: list[list[int]] = field(default_factory=list)
    betti: list[list[int]] | None = None
    defects: list[int] | None = None
    reg: int | None = None
    reg_bound_t2: int | None = None
    reg_bound_m1_t2: int | None = None
    reg_bound_lazarsfeld: int | None = None
    generator_degrees: dict[str, int] | None = None
    consequences: dict[str, bool] = field(default_factory=dict)
    certifications: dict[str, dict] = field(default_factory=dict)
    status: str = "ok"  # ok | counterexample | capped | error
    problems: list[str] = field(default_factory=list)
    error: str | None = None
    timing: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def trial_seed(master: int, index: int) -> int:
    return int(np.random.default_rng([int(master), int(index)]).integers(0, 2**31 - 1))


def _curve_for(pol: Polarization, spec: str | None, prime: int):
    return parse_curve(spec, pol.model, prime) if spec else default_curve(pol.model, prime)


def restriction_codim_range(pol: Polarization, curve, prime: int) -> tuple[int, int]:
    """Codimensions with a reachable restriction codimension <= m - 2 that
    keep dim V >= 6, so that V can be an embedding."""
    kappa = pol.model.h0(pol.model.sub(pol.L, curve.cls))
    hi = min(pol.h0 - 6, kappa + curve.m - 2)
    return (1, max(1, hi))


def boundary_codimension(pol: Polarization, curve) -> int:
    return pol.model.h0(pol.model.sub(pol.L, curve.cls)) + curve.m - 2


def _evaluate(V, curve, rec: TrialRecord, timer: _Timer, p: int, window: int | None,
              boundary_applies: bool | None = None) -> TrialRecord:
    """Fill in every invariant of a trial and judge it.

    With ``boundary_applies`` None the trial is judged against the
    restriction hypothesis (codim <= m - 2 on an embedding, expecting N^S_p,
    the kernel bundle vanishing and regularity <= t + 2); otherwise it is a
    generic trial that must satisfy N^S_p exactly when the flag is set.
    """
    ring = SectionRing(V)
    m = curve.m
    rec.m = m
    data = restriction_image_codim(V, curve)
    rec.restriction_codim, rec.kernel_dim = data.codim, data.kernel_dim
    try:
        st = restricted_kernel_splitting(V, curve)
        rec.splitting = list(st.twists)
        rec.restricted_vanishing = lemma3_hypothesis(V, curve, p)
    except BasePointError:
        rec.restricted_vanishing = False
    timer.check("restriction")

    J = V.t + 4 if window is None else window
    rec.window = J
    verdict = check_NSp(V, p, J, ring)
    rec.nsp_holds = verdict.holds_in_window
    rec.offending = [list(x) for x in verdict.offending]
    rec.betti = verdict.table.rows()
    timer.check("Betti numbers")

    va = embedding_certification(V, ring, max_degree=V.t + 2)
    bpf = base_point_free_check(V, exact=True, seed=rec.seed)
    rec.certifications = {"very_ample": va.to_dict(), "base_point_free": bpf.to_dict()}
    embedded = va.holds is True
    restriction_ok = data.codim <= m - 2
    if boundary_applies is None:
        rec.hypothesis_applies = bool(restriction_ok and embedded)
    else:
        rec.hypothesis_applies = bool(boundary_applies)

    if embedded:
        rep = regularity(V, bound=max(V.t + 4, 4), ring=ring, raise_if_missing=False)
        rec.reg = rep.reg
        rec.reg_bound_t2, rec.reg_bound_m1_t2 = rep.t_plus_2, rep.m_t_bound
        rec.reg_bound_lazarsfeld = rep.lazarsfeld_bound
        timer.check("regularity")
        rec.defects = [ring.defect(k) for k in range(1, J + 1)]
        gens = ideal_generator_degrees(V, V.t + 3, ring)
        rec.generator_degrees = {str(k): v for k, v in sorted(gens.items())}
        timer.check("ideal generators")
        if rec.nsp_holds:
            t = V.t
            rec.consequences = {
                "k_normal_from_t_plus_1": all(d == 0 for d in rec.defects[t:]),
                "generators_at_most_t_plus_2": all(int(k) <= t + 2 for k in rec.generator_degrees),
                "reg_at_most_max_m1_t2": rec.reg is not None and rec.reg <= rep.m_t_bound,
                "reg_at_most_lazarsfeld": rec.reg is not None and rec.reg <= rep.lazarsfeld_bound,
            }

    problems = []
    if boundary_applies is None and restriction_ok and not rec.restricted_vanishing:
        problems.append("restricted kernel bundle vanishing fails under codim <= m - 2")
    if rec.hypothesis_applies:
        if not rec.nsp_holds:
            problems.append("N^S_p fails in the window")
        if boundary_applies is None and (rec.reg is None or rec.reg > V.t + 2):
            problems.append(f"regularity {rec.reg} exceeds t + 2 = {V.t + 2}")
    problems += [f"consequence {k} fails" for k, ok in rec.consequences.items() if not ok]
    rec.problems = problems
    rec.status = "counterexample" if problems else "ok"
    return rec


def _run_trial(args) -> dict:
    campaign, index = args
    prime = check_prime(campaign.prime)
    pol = parse_model(campaign.model)
    curve = _curve_for(pol, campaign.curve, prime)
    seed = trial_seed(campaign.seed, index)
    rng = np.random.default_rng([seed, 0xC0D1])
    timer = _Timer(campaign.cap_seconds)
    rec = TrialRecord(index, pol.spec, curve.spec(), prime, seed, "", 0, 0, p=campaign.p)
    try:
        if campaign.check == "theorem13":
            lo, hi = campaign.codims or restriction_codim_range(pol, curve, prime)
            t = int(rng.integers(lo, hi + 1))
            kappa = pol.model.h0(pol.model.sub(pol.L, curve.cls))
            rc_lo, rc_hi = max(0, t - kappa), min(curve.m - 2, t)
            if rc_lo > rc_hi:
                raise SubsystemError(f"no restriction codimension <= {curve.m - 2} is reachable at t = {t}")
            rc = int(rng.integers(rc_lo, rc_hi + 1))
            spec = Constrained(seed, t, rc)
            applies = None
        elif campaign.check == "corollary14":
            lo, hi = campaign.codims or (boundary_codimension(pol, curve),) * 2
            t = int(rng.integers(lo, hi + 1))
            spec = Generic(seed, t) if t else Complete()
            applies = t <= boundary_codimension(pol, curve)
        else:
            raise ValueError(f"unknown campaign check {campaign.check!r}")
        V = make_subsystem(pol, spec, prime, curve)
        rec.subsystem, rec.t, rec.dim_v = spec.describe(), V.t, V.dim
        _evaluate(V, curve, rec, timer, campaign.p, campaign.window, applies)
    except RuntimeCapExceeded as exc:
        rec.status, rec.error = "capped", str(exc)
    except (SubsystemError, ValueError, ArithmeticError) as exc:
        rec.status, rec.error = "error", f"{type(exc).__name__}: {exc}"
    if campaign.include_timing:
        rec.timing = round(timer.elapsed, 3)
    return rec.to_dict()


def _run_all(campaign: Campaign, indices) -> list[dict]:
    work = [(campaign, i) for i in indices]
    if campaign.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=campaign.jobs) as pool:
            return list(pool.map(_run_trial, work))  # map keeps submission order
    return [_run_trial(w) for w in work]


def summarize(records: list[dict]) -> dict:
    statuses = {}
    for r in records:
        statuses[r["status"]] = statuses.get(r["status"], 0) + 1
    rc_dist = {}
    for r in records:
        if r.get("restriction_codim") is not None:
            key = str(r["restriction_codim"])
            rc_dist[key] = rc_dist.get(key, 0) + 1
    return {
        "trials": len(records),
        "statuses": dict(sorted(statuses.items())),
        "counterexamples": statuses.get("counterexample", 0),
        "hypothesis_applies": sum(1 for r in records if r.get("hypothesis_applies")),
        "nsp_holds": sum(1 for r in records if r.get("nsp_holds")),
        "restriction_codims": dict(sorted(rc_dist.items(), key=lambda kv: int(kv[0]))),
    }


def dump_counterexamples(campaign: Campaign, records: list[dict], directory: str | Path) -> list[Path]:
    """Write the full reproduction data (matrix, seeds, prime) of each counterexample."""
    directory = Path(directory)
    paths = []
    for r in records:
        if r["status"] != "counterexample":
            continue
        pol = parse_model(campaign.model)
        curve = _curve_for(pol, campaign.curve, r["prime"])
        seed = r["seed"]
        spec = Constrained(seed, r["t"], r["restriction_codim"]) if campaign.check == "theorem13" else \
            Generic(seed, r["t"])
        V = make_subsystem(pol, spec, r["prime"], curve)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"counterexample-{campaign.check}-{r['index']}.json"
        payload = {"campaign": asdict(campaign), "record": r, "basis": V.basis.tolist(),
                   "curve_equation": curve.equation(r["prime"]).tolist()}
        path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8")
        paths.append(path)
    return paths


def run_campaign(campaign: Campaign) -> dict:
    records = _run_all(campaign, range(campaign.trials))
    out = {"campaign": asdict(campaign), "summary": summarize(records), "records": records}
    if campaign.output:
        write_json(out, campaign.output)
        dump_counterexamples(campaign, records, Path(campaign.output).parent)
    return out


def run_theorem13_campaign(campaign: Campaign) -> dict:
    return run_campaign(replace(campaign, check="theorem13"))


def run_corollary14_campaign(campaign: Campaign) -> dict:
    """Generic V at the boundary codimension, plus the dimension identity for
    the span of C."""
    result = run_campaign(replace(campaign, check="corollary14"))
    pol = parse_model(campaign.model)
    curve = _curve_for(pol, campaign.curve, campaign.prime)
    kappa = pol.model.h0(pol.model.sub(pol.L, curve.cls))
    lam = lambda_dimension(pol, curve, campaign.prime)
    boundary = boundary_codimension(pol, curve)
    extra = {"boundary_codim": boundary, "h0_L_minus_C": kappa, "m": curve.m,
             "lambda_dim": lam, "lambda_identity": lam == pol.h0 - kappa - 1,
             "dim_v_at_boundary": pol.h0 - boundary}
    if pol.model.name == "P2":
        d = pol.L[0]
        extra["dimension_bounds"] = {"vector_space_2d": 2 * d, "projective_2d_minus_1": 2 * d - 1}
    result["summary"].update(extra)
    return result


# --------------------------------------------------------------------------
# known thresholds


@dataclass(frozen=True)
class ThresholdFixture:
    model: str
    threshold: int  # N_p holds exactly for p <= threshold
    p_cap: int


def known_threshold(pol: Polarization) -> int:
    """Largest p with N_p for the complete embedding (P^2: 3d - 3 read as a
    bound on p; F_e: 2a + 2b - ae - 3)."""
    if pol.model.name == "P2":
        return 3 * pol.L[0] - 3
    a, b = pol.L
    return 2 * a + 2 * b - a * pol.model.e - 3


THRESHOLD_FIXTURES = (
    ThresholdFixture("p2:d=3", 6, 4),
    ThresholdFixture("hirzebruch:e=0,a=2,b=2", 5, 3),
    ThresholdFixture("hirzebruch:e=1,a=2,b=3", 5, 3),
)


def verify_known_thresholds(window: int = 6, prime: int = DEFAULT_PRIME, full: bool = True,
                            cap_seconds: float | None = 600.0, fixtures=THRESHOLD_FIXTURES) -> dict:
    """N_p for p <= cap on each fixture; with ``full`` also every p up to the
    threshold and a nonzero k_{threshold+1, j} in the window."""
    out = []
    for fx in fixtures:
        timer = _Timer(cap_seconds)
        pol = parse_model(fx.model)
        V = make_subsystem(pol, Complete(), prime)
        assert known_threshold(pol) == fx.threshold
        entry = {"model": fx.model, "threshold": fx.threshold, "p_cap": fx.p_cap, "window": window}
        try:
            p_max = fx.threshold + 1 if full else fx.p_cap
            table = betti_table(V, p_max, window, "E")
            timer.check("Betti table")
            first_bad = min([i for (i, j, k) in table.nonzero(j_min=2)], default=None)
            entry["table"] = table.rows()
            entry["capped_holds"] = all(table[(i, j)] == 0 for i in range(fx.p_cap + 1)
                                        for j in range(2, window + 1))
            if full:
                entry["holds_up_to_threshold"] = first_bad is None or first_bad > fx.threshold
                entry["fails_above_threshold"] = first_bad == fx.threshold + 1
                entry["first_failure"] = first_bad
            entry["status"] = "ok"
        except RuntimeCapExceeded as exc:
            entry["status"] = "capped"
            entry["note"] = f"{exc}; only the holds side is judged"
        out.append(entry)
    ok = all(e.get("capped_holds") for e in out) and all(
        e.get("holds_up_to_threshold", True) and e.get("fails_above_threshold", True) for e in out)
    return {"fixtures": out, "all_pass": ok,
            "notes": ["the P^2 threshold is read as p <= 3d - 3"]}


# --------------------------------------------------------------------------
# scans and persistence


SCAN_COLUMNS = (
    "index", "model", "curve", "prime", "seed", "subsystem", "t", "rc_target", "dim_v",
    "restriction_codim", "kernel_dim", "m", "hypothesis_applies", "restricted_vanishing", "splitting",
    "nsp_holds", "p", "window", "offending", "reg", "reg_bound_t2", "reg_bound_m1_t2",
    "reg_bound_lazarsfeld", "generator_degrees", "very_ample", "base_point_free", "status", "error",
)


def scan(model: str, codims, rcs, trials_per_cell: int = 1, seed: int = 0, curve: str | None = None,
         prime: int = DEFAULT_PRIME, p: int = 1, window: int | None = None,
         cap_seconds: float | None = DEFAULT_CAP_SECONDS) -> list[dict]:
    """One row per trial over the grid codims x rcs (constrained subsystems)."""
    rows = []
    pol = parse_model(model)
    crv = _curve_for(pol, curve, prime)
    index = 0
    for t in codims:
        for rc in rcs:
            for _ in range(trials_per_cell):
                s = trial_seed(seed, index)
                rec = TrialRecord(index, pol.spec, crv.spec(), prime, s, "", int(t), 0, p=p)
                timer = _Timer(cap_seconds)
                try:
                    V = make_subsystem(pol, Constrained(s, int(t), int(rc)), prime, crv)
                    rec.subsystem, rec.dim_v = V.describe(), V.dim
                    _evaluate(V, crv, rec, timer, p, window)
                except RuntimeCapExceeded as exc:
                    rec.status, rec.error = "capped", str(exc)
                except (SubsystemError, ValueError, ArithmeticError) as exc:
                    rec.status, rec.error = "error", f"{type(exc).__name__}: {exc}"
                row = _scan_row(rec.to_dict())
                row["rc_target"] = int(rc)
                rows.append(row)
                index += 1
    return rows


def _scan_row(rec: dict) -> dict:
    row = {k: rec.get(k) for k in SCAN_COLUMNS}
    certs = rec.get("certifications") or {}
    row["very_ample"] = (certs.get("very_ample") or {}).get("level")
    row["base_point_free"] = (certs.get("base_point_free") or {}).get("level")
    return row


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return str(v)


def rows_to_csv(rows: list[dict], columns=SCAN_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def write_json(obj, path: str | Path):
    Path(path).write_text(to_json(obj), encoding="utf-8")


def write_dataset(rows: list[dict], path: str | Path, fmt: str = "csv"):
    text = rows_to_csv(rows) if fmt == "csv" else to_json(rows)
    Path(path).write_bytes(text.encode("utf-8"))


# --------------------------------------------------------------------------
# multi-prime audit


def audit_betti(model: str, subsystem_spec, p_max: int, J: int, n_primes: int = 3,
                first_prime: int = DEFAULT_PRIME, curve: str | None = None, kind: str = "E") -> dict:
    """The same Betti table at several primes; disagreement is reported."""
    tables = {}
    for q in audit_primes(n_primes, first_prime):
        pol = parse_model(model)
        crv = _curve_for(pol, curve, q) if pol.model.dim == 2 else None
        V = make_subsystem(pol, subsystem_spec, q, crv)
        tables[str(q)] = betti_table(V, p_max, J, kind).rows()
    values = list(tables.values())
    return {"primes": [int(q) for q in tables], "agree": all(v == values[0] for v in values),
            "tables": tables}
