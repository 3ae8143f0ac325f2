"""Splitting types of kernel bundles on P^1.

For a base point free W of dimension w inside H^0(P^1, O(n)) the kernel
bundle M_W of W (x) O -> O(n) splits as a sum of O(-a_i).  Its twisted global
sections are kernels of multiplication maps, so the twists are read off from
the ranks of W (x) H^0(O(k)) -> H^0(O(n + k)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import rank
from .models import RationalCurve
from .subsystems import Subsystem, binary_forms_gcd_degree, restriction_image_codim


class BasePointError(ValueError):
    pass


@dataclass(frozen=True)
class SplittingType:
    """M = sum O(-a_i) with ``twists`` sorted increasingly."""

    twists: tuple[int, ...]
    degree: int
    codim: int
    h0_profile: tuple[int, ...] = ()  # h^0(M(k)) for k = 0, 1, ...

    @property
    def rank(self) -> int:
        return len(self.twists)

    @property
    def nonzero(self) -> tuple[int, ...]:
        return tuple(a for a in self.twists if a)

    def to_dict(self) -> dict:
        return {"twists": list(self.twists), "degree": self.degree, "codim": self.codim,
                "rank": self.rank, "h0_profile": list(self.h0_profile)}


def _mult_matrix(W: np.ndarray, k: int) -> np.ndarray:
    """Columns: w_s * u^(k-q) v^q for s, q; rows: coefficients in degree n + k."""
    w, n1 = W.shape
    M = np.zeros((n1 + k, w * (k + 1)), dtype=np.int64)
    for s in range(w):
        for q in range(k + 1):
            M[q:q + n1, s * (k + 1) + q] = W[s]
    return M


def kernel_h0(W, k: int, p: int) -> int:
    """h^0(M_W(k)) = dim ker(W (x) H^0(O(k)) -> H^0(O(n + k)))."""
    W = np.atleast_2d(np.asarray(W, dtype=np.int64) % p)
    if k < 0:
        return 0
    M = _mult_matrix(W, k)
    return M.shape[1] - rank(M, p)


def splitting_type_on_line(W, p: int) -> SplittingType:
    """Splitting type of M_W for a base point free W of binary forms (rows)."""
    W = np.atleast_2d(np.asarray(W, dtype=np.int64) % p)
    n = W.shape[1] - 1
    if rank(W, p) != W.shape[0]:
        raise ValueError("the rows spanning W must be linearly independent")
    if binary_forms_gcd_degree(W, p) != 0:
        raise BasePointError("W has a base point on P^1")
    target = W.shape[0] - 1  # rank of M_W
    profile: list[int] = []
    counts: list[int] = []  # number of twists <= k
    k = 0
    while not counts or counts[-1] < target:
        if k > n:  # every twist is at most n once W is base point free
            raise RuntimeError("splitting type did not close up; inconsistent ranks")
        profile.append(kernel_h0(W, k, p))
        counts.append(profile[-1] - (profile[-2] if k else 0))
        k += 1
    twists: list[int] = []
    prev = 0
    for a, c in enumerate(counts):
        twists.extend([a] * (c - prev))
        prev = c
    return SplittingType(tuple(twists), n, n + 1 - W.shape[0], tuple(profile))


def wedge_h1_vanishes(st: SplittingType | tuple[int, ...], i: int, j: int) -> bool:
    """Whether H^1(P^1, wedge^i M (x) O(j)) = 0."""
    twists = st.twists if isinstance(st, SplittingType) else tuple(sorted(st))
    if i > len(twists):
        return True  # the wedge power is zero
    top = sum(sorted(twists, reverse=True)[:i])
    return top <= j + 1


def restricted_kernel_splitting(V: Subsystem, curve: RationalCurve) -> SplittingType:
    """Splitting type of M_V restricted to C = P^1.

    Sections of V vanishing on C contribute trivial summands, so the result
    is the splitting type of the image V' with dim V - dim V' zeros added.
    """
    data = restriction_image_codim(V, curve)
    if data.image_rank == 0:
        raise BasePointError("V restricts to zero on the curve")
    st = splitting_type_on_line(data.image_basis, V.prime)
    twists = (0,) * data.kernel_dim + st.twists
    return SplittingType(twists, st.degree, st.codim, st.h0_profile)


def lemma3_hypothesis(V: Subsystem, curve: RationalCurve, p: int) -> bool:
    """Vanishing of H^1(C, wedge^(i+2) M_V (x) A (x) O_C) for 0 <= i <= p.

    A|_C has degree m = C^2; larger powers of A only raise the twist, so the
    first power is the binding one.
    """
    st = restricted_kernel_splitting(V, curve)
    m = curve.m
    return all(wedge_h1_vanishes(st, i + 2, m) for i in range(p + 1))
