"""Surfaces, line bundles, graded pieces and the rational curves on them.

Sections are monomials in the Cox ring of a toric variety:

* ``ProjectivePlane``: variables x, y, z; the class of O(d) is ``(d,)``.
* ``Hirzebruch(e)``: variables x0, x1, y0, y1 with ``x_i`` of class f,
  ``y0`` of class C_0 and ``y1`` of class C_0 + e f.  The class aC_0 + bf is
  written ``(a, b)``; its monomials satisfy d0 + d1 = a, c0 + c1 + e*d1 = b.
* ``ProjectiveLine``: variables u, v; a one-dimensional rig used to test the
  syzygy machinery against brute force.

Monomials of a piece are listed in descending lexicographic order of their
exponent vectors.  Binary forms on P^1 are coefficient vectors ``c`` with
``c[r]`` the coefficient of ``u^(n-r) v^r``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import scipy.sparse as sp

from ._config import DEFAULT_PRIME
from .linalg import Matrix, rank


class ModelError(ValueError):
    pass


# --------------------------------------------------------------------------
# graded pieces


@dataclass(frozen=True, eq=False)
class GradedPiece:
    """Monomial basis of H^0 of one line-bundle class."""

    cls: tuple[int, ...]
    exps: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.exps.shape[0])

    def __len__(self) -> int:
        return self.dim

    @cached_property
    def _lookup(self) -> tuple[int, np.ndarray, np.ndarray, np.ndarray]:
        base = int(self.exps.max()) + 1 if self.dim else 1
        radix = base ** np.arange(self.exps.shape[1], dtype=np.int64)
        codes = self.exps @ radix
        order = np.argsort(codes)
        return base, radix, codes[order], order

    def index_of(self, exps: np.ndarray) -> np.ndarray:
        """Positions of the given exponent vectors (any leading shape)."""
        exps = np.asarray(exps, dtype=np.int64)
        base, radix, sorted_codes, order = self._lookup
        if exps.size == 0:
            return np.zeros(exps.shape[:-1], dtype=np.int64)
        if self.dim == 0 or exps.min() < 0 or exps.max() >= base:
            raise ModelError(f"monomial not in the piece of class {self.cls}")
        codes = exps @ radix
        pos = np.searchsorted(sorted_codes, codes)
        pos = np.minimum(pos, sorted_codes.size - 1)
        if not np.all(sorted_codes[pos] == codes):
            raise ModelError(f"monomial not in the piece of class {self.cls}")
        return order[pos]


def _desc_lex(rows: list[tuple[int, ...]], nvars: int) -> np.ndarray:
    if not rows:
        return np.zeros((0, nvars), dtype=np.int64)
    rows.sort(reverse=True)
    return np.array(rows, dtype=np.int64)


# --------------------------------------------------------------------------
# models


class SurfaceModel:
    """Common interface; concrete subclasses fix the Picard lattice."""

    name: str
    nvars: int
    dim: int  # dimension of the variety
    rank_pic: int

    # -- lattice ----------------------------------------------------------
    @property
    def canonical(self) -> tuple[int, ...]:
        raise NotImplementedError

    def check_class(self, cls) -> tuple[int, ...]:
        cls = tuple(int(c) for c in cls)
        if len(cls) != self.rank_pic:
            raise ModelError(f"{self.name}: a class has {self.rank_pic} coordinates, got {cls}")
        return cls

    def add(self, c1, c2) -> tuple[int, ...]:
        return tuple(a + b for a, b in zip(self.check_class(c1), self.check_class(c2)))

    def sub(self, c1, c2) -> tuple[int, ...]:
        return tuple(a - b for a, b in zip(self.check_class(c1), self.check_class(c2)))

    def scale(self, cls, k: int) -> tuple[int, ...]:
        return tuple(k * a for a in self.check_class(cls))

    def intersection(self, c1, c2) -> int:
        raise NotImplementedError

    def chi(self, cls) -> int:
        raise NotImplementedError

    def is_very_ample(self, cls) -> bool:
        raise NotImplementedError

    # -- sections ---------------------------------------------------------
    def _exponents(self, cls) -> np.ndarray:
        raise NotImplementedError

    def piece(self, cls) -> GradedPiece:
        return _piece(self, self.check_class(cls))

    def h0(self, cls) -> int:
        return self.piece(cls).dim

    def cohomology_table(self, cls) -> tuple[int, int, int]:
        """(h0, h1, h2); h2 by Serre duality, h1 from Riemann-Roch."""
        cls = self.check_class(cls)
        h0 = self.h0(cls)
        h2 = self.h0(self.sub(self.canonical, cls)) if self.dim == 2 else 0
        h1 = h0 + h2 - self.chi(cls) if self.dim == 2 else self.h0(self.sub(self.canonical, cls))
        return h0, h1, h2

    def spec(self, cls) -> str:
        raise NotImplementedError

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def _key(self):
        return ()

    def __repr__(self):
        return self.name


@lru_cache(maxsize=512)
def _piece(model: SurfaceModel, cls: tuple[int, ...]) -> GradedPiece:
    exps = model._exponents(cls)
    exps.setflags(write=False)
    return GradedPiece(cls, exps)


class ProjectivePlane(SurfaceModel):
    name = "P2"
    nvars = 3
    dim = 2
    rank_pic = 1

    @property
    def canonical(self):
        return (-3,)

    def intersection(self, c1, c2):
        return self.check_class(c1)[0] * self.check_class(c2)[0]

    def chi(self, cls):
        (d,) = self.check_class(cls)
        return (d + 1) * (d + 2) // 2

    def is_very_ample(self, cls):
        return self.check_class(cls)[0] >= 1

    def _exponents(self, cls):
        (d,) = cls
        rows = [(i, j, d - i - j) for i in range(d + 1) for j in range(d - i + 1)] if d >= 0 else []
        return _desc_lex(rows, 3)

    def spec(self, cls):
        return f"p2:d={cls[0]}"


class Hirzebruch(SurfaceModel):
    nvars = 4
    dim = 2
    rank_pic = 2

    def __init__(self, e: int):
        if e < 0:
            raise ModelError("Hirzebruch surfaces F_e need e >= 0")
        self.e = int(e)
        self.name = f"F{self.e}"

    def _key(self):
        return (self.e,)

    @property
    def canonical(self):
        return (-2, -self.e - 2)

    def intersection(self, c1, c2):
        a1, b1 = self.check_class(c1)
        a2, b2 = self.check_class(c2)
        return -self.e * a1 * a2 + a1 * b2 + a2 * b1

    def chi(self, cls):
        D = self.check_class(cls)
        return 1 + self.intersection(D, self.sub(D, self.canonical)) // 2

    def is_very_ample(self, cls):
        a, b = self.check_class(cls)
        return a >= 1 and b >= a * self.e + 1

    def _exponents(self, cls):
        a, b = cls
        rows = []
        if a >= 0:
            for d1 in range(a + 1):
                s = b - self.e * d1
                for c0 in range(s + 1):
                    rows.append((c0, s - c0, a - d1, d1))
        return _desc_lex(rows, 4)

    def spec(self, cls):
        return f"hirzebruch:e={self.e},a={cls[0]},b={cls[1]}"


class ProjectiveLine(SurfaceModel):
    """P^1 with O(d); a test rig for rational normal curves."""

    name = "P1"
    nvars = 2
    dim = 1
    rank_pic = 1

    @property
    def canonical(self):
        return (-2,)

    def intersection(self, c1, c2):  # degree pairing is not an intersection form
        raise ModelError("P1 has no intersection form")

    def chi(self, cls):
        return self.check_class(cls)[0] + 1

    def is_very_ample(self, cls):
        return self.check_class(cls)[0] >= 1

    def _exponents(self, cls):
        (d,) = cls
        rows = [(d - r, r) for r in range(d + 1)] if d >= 0 else []
        return _desc_lex(rows, 2)

    def spec(self, cls):
        return f"p1:d={cls[0]}"


# --------------------------------------------------------------------------
# ring structure


def product_index(model: SurfaceModel, A: GradedPiece, B: GradedPiece) -> np.ndarray:
    """``idx[a, b]`` = position of monomial A[a] * B[b] in the piece of A + B."""
    target = model.piece(model.add(A.cls, B.cls))
    sums = A.exps[:, None, :] + B.exps[None, :, :]
    return target.index_of(sums)


def multiplication_map(model: SurfaceModel, A: GradedPiece, B: GradedPiece,
                       prime: int = DEFAULT_PRIME) -> Matrix:
    """Matrix of A (x) B -> A+B in monomial bases; column a*|B| + b."""
    target = model.piece(model.add(A.cls, B.cls))
    idx = product_index(model, A, B).reshape(-1)
    M = np.zeros((target.dim, idx.size), dtype=np.int64)
    M[idx, np.arange(idx.size)] = 1
    return Matrix(M, prime)


def form_multiplier(model: SurfaceModel, form_cls, coeffs, source_cls, prime: int) -> sp.csr_matrix:
    """Sparse matrix of multiplication by a form of class ``form_cls`` from the
    piece of ``source_cls`` to the piece of ``form_cls + source_cls``."""
    F = model.piece(form_cls)
    S = model.piece(source_cls)
    T = model.piece(model.add(form_cls, source_cls))
    coeffs = np.asarray(coeffs, dtype=np.int64) % prime
    support = np.flatnonzero(coeffs)
    if support.size == 0 or S.dim == 0:
        return sp.csr_matrix((T.dim, S.dim), dtype=np.int64)
    idx = product_index(model, GradedPiece(F.cls, F.exps[support]), S)
    rows = idx.reshape(-1)
    cols = np.tile(np.arange(S.dim), support.size)
    data = np.repeat(coeffs[support], S.dim)
    return sp.csr_matrix((data, (rows, cols)), shape=(T.dim, S.dim), dtype=np.int64)


# --------------------------------------------------------------------------
# binary forms


def form_mul(f: np.ndarray, g: np.ndarray, p: int) -> np.ndarray:
    return np.convolve(np.asarray(f, dtype=np.int64), np.asarray(g, dtype=np.int64)) % p


def form_pow(f: np.ndarray, k: int, p: int) -> np.ndarray:
    out = np.array([1], dtype=np.int64)
    for _ in range(k):
        out = form_mul(out, f, p)
    return out


def form_eval(f, u: int, v: int, p: int) -> int:
    n = len(f) - 1
    return sum(int(c) * pow(u, n - r, p) * pow(v, r, p) for r, c in enumerate(f)) % p


# --------------------------------------------------------------------------
# rational curves


class RationalCurve:
    """A smooth rational curve C with a parametrization P^1 -> C."""

    model: SurfaceModel
    cls: tuple[int, ...]

    @property
    def self_intersection(self) -> int:
        return self.model.intersection(self.cls, self.cls)

    @property
    def m(self) -> int:
        return self.self_intersection

    def degree_on(self, L) -> int:
        return self.model.intersection(L, self.cls)

    def equation(self, prime: int) -> np.ndarray:
        """Coefficients of the defining section in the piece of ``cls``."""
        raise NotImplementedError

    def restriction_matrix(self, L, prime: int) -> np.ndarray:
        """(L.C + 1) x h0(L) matrix of H^0(X, L) -> H^0(P^1, O(L.C))."""
        raise NotImplementedError

    def restrict(self, L, form, prime: int) -> np.ndarray:
        M = self.restriction_matrix(L, prime)
        return (M @ (np.asarray(form, dtype=np.int64) % prime)) % prime

    def spec(self) -> str:
        raise NotImplementedError


class Conic(RationalCurve):
    """The conic xz - y^2 in P^2, parametrized by (u^2, uv, v^2)."""

    def __init__(self, model: ProjectivePlane | None = None):
        self.model = model or ProjectivePlane()
        self.cls = (2,)

    def equation(self, prime):
        piece = self.model.piece(self.cls)
        eq = np.zeros(piece.dim, dtype=np.int64)
        eq[piece.index_of(np.array([1, 0, 1]))] = 1
        eq[piece.index_of(np.array([0, 2, 0]))] = prime - 1
        return eq

    def restriction_matrix(self, L, prime):
        piece = self.model.piece(L)
        n = self.degree_on(L)
        M = np.zeros((n + 1, piece.dim), dtype=np.int64)
        if piece.dim:
            r = piece.exps[:, 1] + 2 * piece.exps[:, 2]
            M[r, np.arange(piece.dim)] = 1
        return M

    def spec(self):
        return "conic"


class HirzebruchSection(RationalCurve):
    """A member y0*g_{e+1}(x) + y1*g_1(x) of |C_0 + (e+1) f| on F_e.

    Parametrized by x = (u, v), y0 = g_1(u, v), y1 = -g_{e+1}(u, v); a nonzero
    resultant of g_1 and g_{e+1} keeps the curve irreducible.
    """

    def __init__(self, model: Hirzebruch, g1, g_top, seed: int | None = None):
        self.model = model
        self.cls = (1, model.e + 1)
        self.g1 = np.asarray(g1, dtype=np.int64)
        self.g_top = np.asarray(g_top, dtype=np.int64)
        self.seed = seed
        if self.g1.size != 2 or self.g_top.size != model.e + 2:
            raise ModelError("need g_1 of degree 1 and g_{e+1} of degree e+1")

    @classmethod
    def from_seed(cls, model: Hirzebruch, seed: int, prime: int = DEFAULT_PRIME,
                  max_tries: int = 100) -> "HirzebruchSection":
        rng = np.random.default_rng([seed, 0x5EC7])
        for _ in range(max_tries):
            g1 = rng.integers(0, prime, size=2)
            g_top = rng.integers(0, prime, size=model.e + 2)
            if resultant_nonzero(g1, g_top, prime):
                return cls(model, g1, g_top, seed)
        raise ModelError("could not draw a section curve with nonzero resultant")

    def equation(self, prime):
        piece = self.model.piece(self.cls)
        e = self.model.e
        eq = np.zeros(piece.dim, dtype=np.int64)
        for r in range(e + 2):  # y0 * x0^(e+1-r) x1^r
            eq[piece.index_of(np.array([e + 1 - r, r, 1, 0]))] = self.g_top[r] % prime
        for r in range(2):  # y1 * x0^(1-r) x1^r
            eq[piece.index_of(np.array([1 - r, r, 0, 1]))] = self.g1[r] % prime
        return eq

    def restriction_matrix(self, L, prime):
        piece = self.model.piece(L)
        n = self.degree_on(L)
        M = np.zeros((n + 1, piece.dim), dtype=np.int64)
        neg_top = (-self.g_top) % prime
        pw0, pw1 = {}, {}
        for col, (c0, c1, d0, d1) in enumerate(piece.exps):
            if d0 not in pw0:
                pw0[d0] = form_pow(self.g1 % prime, d0, prime)
            if d1 not in pw1:
                pw1[d1] = form_pow(neg_top, d1, prime)
            f = form_mul(pw0[d0], pw1[d1], prime)
            M[c1:c1 + f.size, col] = f
        return M

    def spec(self):
        return f"section:seed={self.seed}" if self.seed is not None else "section"


def resultant_nonzero(g1, g_top, prime: int) -> bool:
    a, b = int(g1[0]) % prime, int(g1[1]) % prime
    if a == 0 and b == 0:
        return False
    # the root of a*u + b*v is (u:v) = (b : -a)
    return form_eval(g_top, b, (-a) % prime, prime) != 0


# --------------------------------------------------------------------------
# presets and spec strings


@dataclass(frozen=True)
class Polarization:
    """A model together with the class of the embedding line bundle."""

    model: SurfaceModel
    L: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "L", self.model.check_class(self.L))

    @property
    def spec(self) -> str:
        return self.model.spec(self.L)

    @property
    def h0(self) -> int:
        return self.model.h0(self.L)

    @property
    def degree(self) -> int:
        """L^2, the degree of the embedded surface."""
        return self.model.intersection(self.L, self.L)

    def power(self, k: int) -> tuple[int, ...]:
        return self.model.scale(self.L, k)


_KV = re.compile(r"^\s*([a-z]+)\s*=\s*(-?\d+)\s*$")


def _parse_kv(body: str) -> dict[str, int]:
    out = {}
    for part in filter(None, body.split(",")):
        m = _KV.match(part)
        if not m:
            raise ModelError(f"cannot parse {part!r}; expected key=integer")
        out[m.group(1)] = int(m.group(2))
    return out


def parse_model(spec: str) -> Polarization:
    """``p2:d=4``, ``hirzebruch:e=1,a=2,b=3`` (alias ``fe:``), ``p1:d=3``."""
    kind, _, body = spec.strip().partition(":")
    kv = _parse_kv(body)
    kind = kind.lower()
    try:
        if kind in ("p2", "plane"):
            pol = Polarization(ProjectivePlane(), (kv["d"],))
        elif kind in ("hirzebruch", "fe"):
            pol = Polarization(Hirzebruch(kv["e"]), (kv["a"], kv["b"]))
        elif kind in ("p1", "line"):
            pol = Polarization(ProjectiveLine(), (kv["d"],))
        else:
            raise ModelError(f"unknown model kind {kind!r}")
    except KeyError as exc:
        raise ModelError(f"model spec {spec!r} is missing {exc.args[0]!r}") from None
    if not pol.model.is_very_ample(pol.L):
        raise ModelError(f"{pol.spec} is not very ample")
    return pol


def default_curve(model: SurfaceModel, prime: int = DEFAULT_PRIME, seed: int = 0) -> RationalCurve:
    if isinstance(model, ProjectivePlane):
        return Conic(model)
    if isinstance(model, Hirzebruch):
        return HirzebruchSection.from_seed(model, seed, prime)
    raise ModelError(f"no rational curve preset on {model.name}")


def parse_curve(spec: str | None, model: SurfaceModel, prime: int = DEFAULT_PRIME) -> RationalCurve:
    """``conic`` (P^2) or ``section:seed=N`` (F_e)."""
    if spec is None or spec.strip() in ("", "default"):
        return default_curve(model, prime)
    kind, _, body = spec.strip().partition(":")
    if kind == "conic":
        if not isinstance(model, ProjectivePlane):
            raise ModelError("the conic lives on P^2")
        return Conic(model)
    if kind == "section":
        if not isinstance(model, Hirzebruch):
            raise ModelError("section curves live on Hirzebruch surfaces")
        return HirzebruchSection.from_seed(model, _parse_kv(body).get("seed", 0), prime)
    raise ModelError(f"unknown curve spec {spec!r}")


def restriction_rank(curve: RationalCurve, L, prime: int) -> int:
    return rank(curve.restriction_matrix(L, prime), prime)
