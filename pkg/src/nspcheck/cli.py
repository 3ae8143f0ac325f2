"""Command-line interface: ``nspcheck <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import sys

from ._config import DEFAULT_PRIME, check_prime
from .harness import (SCAN_COLUMNS, Campaign, _scan_row, audit_betti, rows_to_csv, run_corollary14_campaign,
                      run_theorem13_campaign, scan, to_json, verify_known_thresholds, write_dataset)
from .kernel_bundles import (BasePointError, lemma3_hypothesis, restricted_kernel_splitting,
                             splitting_type_on_line)
from .koszul import (NotFoundWithinBound, SectionRing, betti_table, check_NSp, default_window,
                     embedding_certification, ideal_generator_degrees, k_normality_defect, regularity)
from .models import ModelError, parse_curve, parse_model
from .subsystems import (SubsystemError, base_point_free_check, lambda_dimension, make_subsystem,
                         parse_subsystem, restriction_image_codim)


def _range(text: str) -> list[int]:
    """``3`` | ``1:4`` (inclusive) | ``1,3,5``; an empty string gives []."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        a, b = text.split(":", 1)
        return list(range(int(a), int(b) + 1))
    return [int(x) for x in text.split(",")]


def _with_seed(spec: str, seed: int) -> str:
    kind = spec.split(":", 1)[0]
    if kind in ("generic", "constrained") and "seed=" not in spec:
        return f"{spec},seed={seed}" if ":" in spec else f"{spec}:seed={seed}"
    return spec


class _Context:
    """Model, curve and subsystem resolved from the command line."""

    def __init__(self, args):
        self.args = args
        self.prime = check_prime(args.prime)
        self.pol = parse_model(args.model)
        self.curve = None
        if self.pol.model.dim == 2:
            self.curve = parse_curve(getattr(args, "curve", None), self.pol.model, self.prime)
        self.spec = parse_subsystem(_with_seed(args.subsystem, args.seed))
        self.V = make_subsystem(self.pol, self.spec, self.prime, self.curve)
        self.ring = SectionRing(self.V)

    @property
    def window(self) -> int:
        return self.args.window if self.args.window is not None else default_window(self.V)

    def certifications(self, exact: bool = True) -> dict:
        out = {"base_point_free": base_point_free_check(self.V, exact=exact, seed=self.args.seed).to_dict()}
        if self.pol.model.dim == 2:
            out["very_ample"] = embedding_certification(self.V, self.ring).to_dict()
        return out

    def report(self, table=None, verdict=None, **extra) -> dict:
        rep = {"model": self.pol.spec, "subsystem": self.spec.describe(), "prime": self.prime,
               "window": table.J if table is not None else self.window,
               "table": table.to_dict() if table is not None else None,
               "verdict": verdict, "certifications": self.certifications(),
               "curve": self.curve.spec() if self.curve else None, "codim": self.V.t, "dim_v": self.V.dim}
        rep.update(extra)
        return rep

    def audit(self, p_max: int, J: int, kind: str = "E") -> dict | None:
        n = self.args.audit_primes
        if not n:
            return None
        return audit_betti(self.pol.spec, self.spec, p_max, J, n, self.prime,
                           self.curve.spec() if self.curve else None, kind)


def _emit(args, payload, text: str | None = None, csv_rows=None):
    fmt = args.output
    if fmt == "text" and text is not None:
        out = text + "\n"
    elif fmt == "csv" and csv_rows is not None:
        columns = list(csv_rows[0].keys()) if csv_rows else ["i", "j", "k"]
        if csv_rows and set(columns) == set(SCAN_COLUMNS):
            columns = SCAN_COLUMNS
        out = rows_to_csv(csv_rows, columns)
    else:
        out = to_json(payload)
    sys.stdout.write(out)


def _audit_line(audit: dict | None) -> str:
    if not audit:
        return ""
    word = "agree" if audit["agree"] else "DISAGREE"
    return f"\naudit primes {audit['primes']}: tables {word}"


def _table_rows(table) -> list[dict]:
    return [{"i": i, "j": j, "k": k} for (i, j), k in sorted(table.entries.items())]


# --------------------------------------------------------------------------
# subcommands


def cmd_splitting(args) -> int:
    ctx = _Context(args)
    if ctx.pol.model.dim == 1:
        st = splitting_type_on_line(ctx.V.basis, ctx.prime)
        extra = {}
    else:
        st = restricted_kernel_splitting(ctx.V, ctx.curve)
        extra = {"restricted_vanishing": {"p": args.p, "holds": lemma3_hypothesis(ctx.V, ctx.curve, args.p),
                            "note": "checked at the first power of A; higher powers only raise the twist"}}
    payload = {"model": ctx.pol.spec, "subsystem": ctx.spec.describe(), "prime": ctx.prime,
               "curve": ctx.curve.spec() if ctx.curve else None, "splitting": st.to_dict(),
               "h0_profile": list(st.h0_profile), **extra}
    text = f"splitting type {st.twists} (degree {st.degree}, codim {st.codim})"
    _emit(args, payload, text)
    return 0


def cmd_betti(args) -> int:
    ctx = _Context(args)
    J = ctx.window
    table = betti_table(ctx.V, args.p_max, J, args.kind, ctx.ring, method=args.method)
    rep = ctx.report(table, None, audit=ctx.audit(args.p_max, J, args.kind))
    _emit(args, rep, table.diagram() + _audit_line(rep["audit"]), _table_rows(table))
    return 3 if rep["audit"] and not rep["audit"]["agree"] else 0


def cmd_check_ns(args) -> int:
    ctx = _Context(args)
    verdict = check_NSp(ctx.V, args.p, ctx.window, ctx.ring)
    rep = ctx.report(verdict.table, verdict.to_dict(), audit=ctx.audit(args.p, verdict.J))
    word = "holds" if verdict.holds_in_window else "fails"
    text = f"N^S_{args.p} {word} for 2 <= j <= {verdict.J}\n{verdict.table.diagram()}" + _audit_line(rep["audit"])
    _emit(args, rep, text, _table_rows(verdict.table))
    return 3 if rep["audit"] and not rep["audit"]["agree"] else 0


def cmd_normality(args) -> int:
    ctx = _Context(args)
    defects = {k: k_normality_defect(ctx.V, k, ctx.ring) for k in range(1, args.k + 1)}
    rep = ctx.report(None, None, k=args.k, defect=defects[args.k],
                     defects={str(k): v for k, v in defects.items()})
    text = "\n".join(f"k={k}: defect {v}" for k, v in defects.items())
    _emit(args, rep, text, [{"k": k, "defect": v} for k, v in defects.items()])
    return 0


def cmd_regularity(args) -> int:
    ctx = _Context(args)
    try:
        rep_obj = regularity(ctx.V, args.bound, ctx.ring)
    except NotFoundWithinBound as exc:
        rep_obj = exc.report
    reg = rep_obj.to_dict()
    gens = None
    if rep_obj.reg is not None:
        gens = {str(k): v for k, v in ideal_generator_degrees(ctx.V, ctx.V.t + 3, ctx.ring).items()}
    rep = ctx.report(None, None, regularity=reg, ideal_generator_degrees=gens)
    if ctx.pol.model.dim == 2 and not rep["certifications"]["very_ample"]["holds"]:
        reg["notes"].append("V is not certified very ample; the levels describe the ideal of the image only "
                            "when the map is an embedding")
    text = f"reg = {reg['reg']}; t+2 = {reg['t_plus_2']}, max(m+1, t+2) = {reg['max_m_plus_1_t_plus_2']}, " \
           f"Lazarsfeld d-r+3 = {reg['lazarsfeld_bound']}"
    _emit(args, rep, text, reg["levels"])
    return 0


def cmd_restrict(args) -> int:
    ctx = _Context(args)
    if ctx.curve is None:
        raise SubsystemError("restriction needs a surface model")
    data = restriction_image_codim(ctx.V, ctx.curve)
    rep = ctx.report(None, None, restriction={
        "degree": data.degree, "image_rank": data.image_rank, "codim": data.codim,
        "kernel_dim": data.kernel_dim, "m": ctx.curve.m,
        "within_m_minus_2": data.codim <= ctx.curve.m - 2,
        "lambda_dim": lambda_dimension(ctx.pol, ctx.curve, ctx.prime)})
    text = f"restriction codim {data.codim} (k = {data.kernel_dim}, L.C = {data.degree}, m = {ctx.curve.m})"
    _emit(args, rep, text)
    return 0


def cmd_campaign(args) -> int:
    codims = _range(args.codims) if args.codims else None
    campaign = Campaign(args.model, args.curve, args.trials, args.seed,
                        (min(codims), max(codims)) if codims else None, args.check, args.p, args.window,
                        check_prime(args.prime), args.cap, args.out, args.jobs, args.timing)
    run = run_theorem13_campaign if args.check == "theorem13" else run_corollary14_campaign
    result = run(campaign)
    s = result["summary"]
    text = json.dumps(s, sort_keys=True, indent=1)
    _emit(args, result, text, [_scan_row(r) for r in result["records"]])
    return 1 if s["counterexamples"] else 0


def cmd_scan(args) -> int:
    rows = scan(args.model, _range(args.codims), _range(args.rcs), args.trials_per_cell, args.seed,
                args.curve, check_prime(args.prime), args.p, args.window, args.cap)
    fmt = "json" if args.output == "json" else "csv"
    if args.out:
        write_dataset(rows, args.out, fmt)
    else:
        sys.stdout.write(rows_to_csv(rows) if fmt == "csv" else to_json(rows))
    return 1 if any(r["status"] == "counterexample" for r in rows) else 0


def cmd_thresholds(args) -> int:
    J = args.window if args.window is not None else 6
    rep = verify_known_thresholds(J, check_prime(args.prime), full=not args.holds_only)
    lines = [f"{f['model']}: threshold {f['threshold']}, capped N_p holds {f.get('capped_holds')}, "
             f"first failure at p = {f.get('first_failure')}" for f in rep["fixtures"]]
    _emit(args, rep, "\n".join(lines))
    return 0 if rep["all_pass"] else 1


# --------------------------------------------------------------------------
# parser


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """Global flags; subcommands repeat them with suppressed defaults so a
    flag given before the subcommand is not overwritten."""

    def default(value):
        return argparse.SUPPRESS if suppress else value

    g = parser.add_argument_group("global options")
    g.add_argument("--prime", type=int, default=default(DEFAULT_PRIME),
                   help="characteristic of the working field (env NSPCHECK_PRIME)")
    g.add_argument("--seed", type=int, default=default(0), help="master seed / default subsystem seed")
    g.add_argument("--window", type=int, default=default(None),
                   help="top degree J of the Betti window (default t+4)")
    g.add_argument("--output", choices=("json", "csv", "text"), default=default(None),
                   help="report format (default json; csv for scan)")
    g.add_argument("--audit-primes", type=int, default=default(0), metavar="N",
                   help="recompute Betti tables at N distinct primes and report disagreement")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", required=True, help="p2:d=4 | hirzebruch:e=1,a=2,b=3 | p1:d=3")
    model.add_argument("--subsystem", default="complete",
                       help="complete | generic:t=2,seed=7 | constrained:t=3,rc=2,seed=1 | file:<path>")
    model.add_argument("--curve", default=None, help="conic | section:seed=N")

    parser = argparse.ArgumentParser(prog="nspcheck",
                                     description="Exact checks of syzygy properties of surface embeddings.")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("splitting", parents=[common, model], help="kernel bundle splitting type")
    p.add_argument("--p", type=int, default=1)
    p.set_defaults(func=cmd_splitting)

    p = sub.add_parser("betti", parents=[common, model], help="graded Betti table")
    p.add_argument("--kind", choices=("E", "R"), default="E")
    p.add_argument("--p-max", type=int, default=2)
    p.add_argument("--method", choices=("reduced", "direct"), default="reduced")
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("check-ns", parents=[common, model], help="Property N^S_p in a window")
    p.add_argument("--p", type=int, default=1)
    p.set_defaults(func=cmd_check_ns)

    p = sub.add_parser("normality", parents=[common, model], help="k-normality defects")
    p.add_argument("--k", type=int, default=3)
    p.set_defaults(func=cmd_normality)

    p = sub.add_parser("regularity", parents=[common, model], help="Castelnuovo-Mumford regularity")
    p.add_argument("--bound", type=int, default=8)
    p.set_defaults(func=cmd_regularity)

    p = sub.add_parser("restrict", parents=[common, model], help="restriction to the curve")
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("campaign", parents=[common], help="seeded verification campaign")
    p.add_argument("--model", required=True)
    p.add_argument("--curve", default=None)
    p.add_argument("--check", choices=("theorem13", "corollary14"), default="theorem13")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--codims", default=None, help="a:b inclusive; default depends on the check")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--cap", type=float, default=60.0, help="per-trial wall-clock cap in seconds")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="store per-trial timings (breaks byte identity)")
    p.add_argument("--out", default=None, help="write the JSON result here")
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("scan", parents=[common], help="codim x restriction-codim sweep")
    p.add_argument("--model", required=True)
    p.add_argument("--curve", default=None)
    p.add_argument("--codims", default="1:3")
    p.add_argument("--rcs", default="0:1")
    p.add_argument("--trials-per-cell", type=int, default=1)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--cap", type=float, default=60.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_scan, default_output="csv")

    p = sub.add_parser("thresholds", parents=[common], help="known N_p thresholds of complete embeddings")
    p.add_argument("--holds-only", action="store_true", help="skip the failure side above each threshold")
    p.set_defaults(func=cmd_thresholds)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.output is None:
        args.output = getattr(args, "default_output", "json")
    try:
        return args.func(args)
    except (ModelError, SubsystemError, BasePointError, ValueError) as exc:
        print(f"nspcheck: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
