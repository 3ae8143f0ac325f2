"""Linear subsystems V of H^0(X, L) and their restriction to a rational curve."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._config import DEFAULT_PRIME, check_prime
from .linalg import Subspace, kernel_basis, matmul_mod, rank
from .models import (Hirzebruch, Polarization, ProjectiveLine, ProjectivePlane,
                     RationalCurve, form_multiplier)

MAX_RETRIES = 100
MIN_SURFACE_SECTIONS = 4

PROVEN = "Proven"
MONTE_CARLO = "MonteCarloEvidence"
ASSUMED = "Assumed"


class SubsystemError(ValueError):
    pass


class InfeasibleConstraint(SubsystemError):
    pass


class RankDeficiency(SubsystemError):
    pass


# --------------------------------------------------------------------------
# specs


@dataclass(frozen=True)
class Complete:
    def describe(self) -> str:
        return "complete"


@dataclass(frozen=True)
class Explicit:
    matrix: tuple[tuple[int, ...], ...]
    source: str = "explicit"

    @classmethod
    def from_array(cls, arr, source: str = "explicit") -> "Explicit":
        return cls(tuple(tuple(int(x) for x in row) for row in np.atleast_2d(arr)), source)

    def describe(self) -> str:
        return self.source


@dataclass(frozen=True)
class Generic:
    seed: int
    t: int

    def describe(self) -> str:
        return f"generic:t={self.t},seed={self.seed}"


@dataclass(frozen=True)
class Constrained:
    """Codimension ``t`` with restriction codimension exactly ``rc`` on a curve."""

    seed: int
    t: int
    rc: int

    def describe(self) -> str:
        return f"constrained:t={self.t},rc={self.rc},seed={self.seed}"


SubsystemSpec = Complete | Explicit | Generic | Constrained


def parse_subsystem(spec: str) -> SubsystemSpec:
    """``complete``, ``generic:t=2,seed=7``, ``constrained:t=3,rc=2,seed=1``
    or ``file:<path>`` (JSON list of rows, or ``{"rows": [...]}``)."""
    spec = spec.strip()
    kind, _, body = spec.partition(":")
    if kind == "complete":
        return Complete()
    if kind == "file":
        data = json.loads(Path(body).read_text(encoding="utf-8"))
        rows = data["rows"] if isinstance(data, dict) else data
        return Explicit.from_array(np.array(rows, dtype=np.int64), source=spec)
    kv = {}
    for part in filter(None, body.split(",")):
        m = re.match(r"^\s*(\w+)\s*=\s*(-?\d+)\s*$", part)
        if not m:
            raise SubsystemError(f"cannot parse {part!r} in subsystem spec {spec!r}")
        kv[m.group(1)] = int(m.group(2))
    try:
        if kind == "generic":
            return Generic(kv.get("seed", 0), kv["t"])
        if kind == "constrained":
            return Constrained(kv.get("seed", 0), kv["t"], kv["rc"])
    except KeyError as exc:
        raise SubsystemError(f"subsystem spec {spec!r} is missing {exc.args[0]!r}") from None
    raise SubsystemError(f"unknown subsystem spec {spec!r}")


# --------------------------------------------------------------------------
# subsystems


@dataclass(frozen=True, eq=False)
class Subsystem:
    """V as the row space of a full-rank ``dim V x h0(L)`` coefficient matrix."""

    pol: Polarization
    basis: np.ndarray
    prime: int
    spec: SubsystemSpec = field(default_factory=Complete)

    def __post_init__(self):
        basis = np.array(self.basis, dtype=np.int64) % self.prime
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def model(self):
        return self.pol.model

    @property
    def L(self):
        return self.pol.L

    @property
    def h0(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def t(self) -> int:
        return self.h0 - self.dim

    @property
    def r(self) -> int:
        return self.dim - 1

    @property
    def seed(self) -> int | None:
        return getattr(self.spec, "seed", None)

    def describe(self) -> str:
        return self.spec.describe()

    def multiplier(self, index: int, source_degree: int):
        """Sparse matrix of multiplication by basis form ``index`` from
        H^0(L^k) to H^0(L^(k+1))."""
        return form_multiplier(self.model, self.L, self.basis[index],
                               self.pol.power(source_degree), self.prime)

    def provenance(self) -> dict:
        return {"spec": self.describe(), "model": self.pol.spec, "prime": self.prime,
                "dim": self.dim, "codim": self.t}


def _rng(seed: int, *salt: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), *salt])


def make_subsystem(pol: Polarization, spec: SubsystemSpec = Complete(), prime: int = DEFAULT_PRIME,
                   curve: RationalCurve | None = None) -> Subsystem:
    prime = check_prime(prime)
    h0 = pol.h0
    if isinstance(spec, Complete):
        return Subsystem(pol, np.eye(h0, dtype=np.int64), prime, spec)

    if isinstance(spec, Explicit):
        M = np.array(spec.matrix, dtype=np.int64) % prime
        if M.ndim != 2 or M.shape[1] != h0:
            raise SubsystemError(f"explicit basis must have {h0} columns, got shape {M.shape}")
        if rank(M, prime) != M.shape[0]:
            raise RankDeficiency("explicit basis rows are linearly dependent")
        return Subsystem(pol, M, prime, spec)

    if isinstance(spec, Generic):
        t = spec.t
        if t < 0:
            raise SubsystemError("codimension must be nonnegative")
        if pol.model.dim == 2 and t > h0 - MIN_SURFACE_SECTIONS:
            raise SubsystemError(f"codimension {t} leaves fewer than {MIN_SURFACE_SECTIONS} sections")
        if t >= h0:
            raise SubsystemError(f"codimension {t} leaves no sections")
        rng = _rng(spec.seed, prime)
        for _ in range(MAX_RETRIES):
            B = rng.integers(0, prime, size=(h0 - t, h0), dtype=np.int64)
            if rank(B, prime) == h0 - t:
                return Subsystem(pol, B, prime, spec)
        raise RankDeficiency(f"no full-rank sample in {MAX_RETRIES} draws")

    if isinstance(spec, Constrained):
        if curve is None:
            raise SubsystemError("a constrained subsystem needs a curve")
        return _constrained(pol, spec, prime, curve)

    raise SubsystemError(f"unsupported subsystem spec {spec!r}")


def _constrained(pol: Polarization, spec: Constrained, prime: int, curve: RationalCurve) -> Subsystem:
    h0 = pol.h0
    t, rc = spec.t, spec.rc
    rho = curve.restriction_matrix(pol.L, prime)
    n1 = rho.shape[0]  # h0(P^1, O(L.C))
    K = kernel_basis(rho, prime)  # H^0(L - C) inside H^0(L)
    kappa = K.shape[0]
    w = h0 - kappa  # dim W
    img_dim = n1 - rc
    ker_dim = h0 - t - img_dim
    if t < 0 or rc < 0 or rc > min(t + (n1 - w), n1) or not (0 <= img_dim <= w) or not (0 <= ker_dim <= kappa):
        raise InfeasibleConstraint(
            f"restriction codimension {rc} is not reachable with codimension {t} "
            f"(dim W = {w}, h0(L - C) = {kappa})")
    complement = np.eye(h0, dtype=np.int64)[Subspace.from_rows(K, prime, n=h0).free] if kappa else \
        np.eye(h0, dtype=np.int64)
    rng = _rng(spec.seed, prime, t, rc)
    for _ in range(MAX_RETRIES):
        parts = []
        if ker_dim:
            parts.append(matmul_mod(rng.integers(0, prime, size=(ker_dim, kappa)), K, prime))
        if img_dim:
            G = matmul_mod(rng.integers(0, prime, size=(img_dim, w)), complement, prime)
            if kappa:
                G = (G + matmul_mod(rng.integers(0, prime, size=(img_dim, kappa)), K, prime)) % prime
            parts.append(G)
        B = np.vstack(parts) if parts else np.zeros((0, h0), dtype=np.int64)
        if rank(B, prime) != h0 - t:
            continue
        V = Subsystem(pol, B, prime, spec)
        if restriction_image_codim(V, curve).codim == rc:
            return V
    raise RankDeficiency(f"no constrained sample in {MAX_RETRIES} draws")


# --------------------------------------------------------------------------
# restriction to the curve


@dataclass(frozen=True)
class RestrictionData:
    degree: int          # L.C
    image_rank: int      # dim V' = dim of the image of V in H^0(C, L|C)
    codim: int           # h0(P^1, O(L.C)) - dim V'
    kernel_dim: int      # dim(V cap H^0(L - C))
    image_basis: np.ndarray = field(repr=False, compare=False)


def restriction_image_codim(V: Subsystem, curve: RationalCurve) -> RestrictionData:
    rho = curve.restriction_matrix(V.L, V.prime)
    images = matmul_mod(V.basis, rho.T, V.prime)  # rows = restricted generators
    S = Subspace.from_rows(images, V.prime, n=rho.shape[0])
    r = S.dim
    return RestrictionData(rho.shape[0] - 1, r, rho.shape[0] - r, V.dim - r, S.basis)


def lambda_dimension(pol: Polarization, curve: RationalCurve, prime: int) -> int:
    """Projective dimension of the span of C in P H^0(X, L)."""
    return rank(curve.restriction_matrix(pol.L, prime), prime) - 1


# --------------------------------------------------------------------------
# base points


@dataclass(frozen=True)
class Certification:
    level: str            # Proven | MonteCarloEvidence | Assumed
    holds: bool | None
    method: str
    trials: int = 0
    extension_degrees: tuple[int, ...] = ()  # degrees of the fields points were drawn from

    def to_dict(self) -> dict:
        return {"level": self.level, "holds": self.holds, "method": self.method,
                "trials": self.trials, "extension_degrees": list(self.extension_degrees)}


def _poly_trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_mod(a: list[int], b: list[int], p: int) -> list[int]:
    """Remainder of a by b; coefficient lists in increasing degree."""
    a = a[:]
    inv = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        q = (a[-1] * inv) % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - q * c) % p
        _poly_trim(a)
    return a


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _poly_trim(a[:]), _poly_trim(b[:])
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def binary_forms_gcd_degree(forms, p: int) -> int:
    """Degree of the gcd of binary forms (rows, ``c[r]`` at u^(n-r) v^r)."""
    forms = np.atleast_2d(np.asarray(forms, dtype=np.int64) % p)
    forms = forms[np.any(forms, axis=1)]
    if forms.shape[0] == 0:
        return forms.shape[1] - 1 if forms.shape[1] else 0
    n = forms.shape[1] - 1
    # powers of v and of u dividing every form
    low = min(int(np.flatnonzero(f)[0]) for f in forms)
    high = max(int(np.flatnonzero(f)[-1]) for f in forms)
    # the rest is an affine gcd in v after setting u = 1
    g: list[int] = []
    for f in forms:
        g = _poly_gcd(g, [int(c) for c in f[low:]], p) if g else _poly_trim([int(c) for c in f[low:]])
        if len(g) == 1:
            break
    return low + (n - high) + max(len(g) - 1, 0)


def binary_base_point_free(forms, p: int) -> Certification:
    deg = binary_forms_gcd_degree(forms, p)
    return Certification(PROVEN, deg == 0, "gcd of binary forms")


def _evaluate_monomials(exps: np.ndarray, points: np.ndarray, p: int) -> np.ndarray:
    """values[pt, mon] = prod points[pt, i] ** exps[mon, i] mod p."""
    maxe = int(exps.max()) if exps.size else 0
    npts, nv = points.shape
    powers = np.ones((npts, nv, maxe + 1), dtype=np.int64)
    for k in range(1, maxe + 1):
        powers[:, :, k] = powers[:, :, k - 1] * points % p
    vals = np.ones((npts, exps.shape[0]), dtype=np.int64)
    for i in range(nv):
        vals = vals * powers[:, i, exps[:, i]] % p
    return vals


def _torus_fixed_points(model) -> np.ndarray:
    if isinstance(model, Hirzebruch):
        return np.array([[x0, 1 - x0, y0, 1 - y0] for x0 in (1, 0) for y0 in (1, 0)], dtype=np.int64)
    return np.eye(model.nvars, dtype=np.int64)


def generation_degree(V: Subsystem, max_degree: int = 6) -> int | None:
    """Smallest k <= max_degree with V * H^0(L^(k-1)) = H^0(L^k), if any.

    Such k exists exactly when V has no base points: at a base point every
    product with a form of V vanishes, while L^k is base point free.
    """
    for k in range(1, max_degree + 1):
        target = V.model.h0(V.pol.power(k))
        if k == 1:
            if V.dim == target:
                return 1
            continue
        src = V.model.h0(V.pol.power(k - 1))
        if V.dim * src < target:
            continue
        rows = np.vstack([V.multiplier(i, k - 1).T.toarray() for i in range(V.dim)])
        if rank(rows, V.prime, cap=target) == target:
            return k
    return None


def base_point_free_check(V, trials: int = 64, seed: int = 0, exact: bool = False,
                          prime: int | None = None) -> Certification:
    """Certification that V has no base points.

    Subsystems of H^0(P^1, O(n)) (a ``Subsystem`` on the P^1 rig or a raw
    array of binary forms) are decided by a gcd.  On surfaces random points
    are tested: a common zero proves failure, otherwise the answer is Monte
    Carlo evidence.  ``exact=True`` additionally searches for a degree in
    which V generates the section ring, which proves base point freeness.
    """
    if not isinstance(V, Subsystem):
        return binary_base_point_free(V, prime or DEFAULT_PRIME)
    p = V.prime
    if isinstance(V.model, ProjectiveLine):
        return binary_base_point_free(V.basis, p)
    if exact:
        k = generation_degree(V)
        if k is not None:
            return Certification(PROVEN, True, f"V generates H^0(L^{k}) from H^0(L^{k - 1})")
    rng = _rng(seed, p, 0xB9F)
    nv = V.model.nvars
    pts = rng.integers(0, p, size=(trials, nv), dtype=np.int64)
    if isinstance(V.model, Hirzebruch):
        # avoid the irrelevant locus x0 = x1 = 0 or y0 = y1 = 0
        pts[:, 0] = np.where((pts[:, 0] == 0) & (pts[:, 1] == 0), 1, pts[:, 0])
        pts[:, 2] = np.where((pts[:, 2] == 0) & (pts[:, 3] == 0), 1, pts[:, 2])
    elif isinstance(V.model, ProjectivePlane):
        pts[:, 0] = np.where(~pts.any(axis=1), 1, pts[:, 0])
    # torus-fixed points first: monomial subsystems keep their base loci there
    pts = np.vstack([_torus_fixed_points(V.model), pts])
    vals = _evaluate_monomials(V.model.piece(V.L).exps, pts, p)
    at_points = matmul_mod(vals, V.basis.T, p)
    if np.any(~at_points.any(axis=1)):
        return Certification(PROVEN, False, "common zero at a sampled F_p-point", len(pts), (1,))
    return Certification(MONTE_CARLO, True, "no common zero among sampled F_p-points", len(pts), (1,))


def embedding_obstruction(V: Subsystem) -> str | None:
    """A numerical reason why V cannot embed the surface, if there is one.

    Smooth surfaces in P^4 satisfy the double point formula
    d^2 - 10d - 5HK - 2K^2 + 12 chi(O) = 0 and smooth surfaces in P^3 have
    K = (d - 4)H; both models are rational, so chi(O) = 1.
    """
    model = V.model
    if model.dim != 2:
        return None
    L, K = V.L, model.canonical
    d = model.intersection(L, L)
    if V.dim <= 3:
        return "a surface does not embed in P^2"
    if V.dim == 4 and model.scale(L, d - 4) != tuple(K):
        return "K is not (d - 4)H, which every smooth surface in P^3 satisfies"
    if V.dim == 5:
        dp = d * d - 10 * d - 5 * model.intersection(L, K) - 2 * model.intersection(K, K) + 12
        if dp != 0:
            return f"the double point formula for P^4 gives {dp}, not 0"
    return None


def very_ample_certification(V: Subsystem) -> Certification:
    """Lattice-level decision; ``koszul.embedding_certification`` adds an
    exact criterion from the coordinate ring."""
    if V.t == 0 and V.model.is_very_ample(V.L):
        return Certification(PROVEN, True, "complete system of a very ample class")
    reason = embedding_obstruction(V)
    if reason:
        return Certification(PROVEN, False, reason)
    return Certification(ASSUMED, None, "very ampleness of a proper subsystem is not decided")
