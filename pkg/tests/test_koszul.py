from __future__ import annotations

from math import comb

import numpy as np
import pytest
from _oracles import BinaryFormModule, resolution_betti
from hypothesis import given, settings
from hypothesis import strategies as st

from nspcheck.koszul import (NotFoundWithinBound, SectionRing, WindowExceeded, betti_table,
                             build_module, check_NSp, embedding_certification, ideal_generator_degrees,
                             k_normality_defect, koszul_betti, koszul_euler_check, regularity)
from nspcheck.models import parse_curve, parse_model
from nspcheck.subsystems import (PROVEN, Complete, Constrained, Explicit, Generic, InfeasibleConstraint,
                                 make_subsystem)

P = 32003


def subsystem(spec, sub=Complete(), prime=P):
    return make_subsystem(parse_model(spec), sub, prime)


# --------------------------------------------------------------------------
# module data


def test_build_module_examples():
    V = subsystem("p2:d=2")
    assert build_module(V, "E", 3).dims == (1, 6, 15, 28)
    data = build_module(V, "R", 3)
    assert data.dims == (1, 6, 15, 28)
    V1 = subsystem("p2:d=2", Generic(0, 1))
    assert build_module(V1, "R", 3).dims[1] == 5 < build_module(V1, "E", 3).dims[1]


def test_build_module_validation():
    V = subsystem("p2:d=2")
    with pytest.raises(ValueError):
        build_module(V, "E", 1)
    with pytest.raises(ValueError):
        build_module(V, "X", 3)
    data = build_module(V, "E", 3)
    with pytest.raises(WindowExceeded):
        koszul_betti(data, 1, 3)
    with pytest.raises(WindowExceeded):
        data.multiplication(3)
    assert data.multiplication(1).shape == (6, 15, 6)


def test_r_pieces_are_images_of_products():
    V = subsystem("p2:d=3", Generic(2, 3))
    data = build_module(V, "R", 3)
    E = build_module(V, "E", 3)
    for j in range(1, 4):
        expected = min(comb(V.dim + j - 1, j), E.dims[j])
        assert data.dims[j] <= expected
    assert data.dims[1] == V.dim


# --------------------------------------------------------------------------
# P^1 rig against the resolution oracle


@pytest.mark.parametrize("d", [1, 2, 3, 4])
@pytest.mark.parametrize("kind", ["E", "R"])
def test_p1_complete_matches_oracle(d, kind):
    V = subsystem(f"p1:d={d}")
    top = 4
    oracle = resolution_betti(BinaryFormModule(np.eye(d + 1, dtype=int).tolist()), top, 3, cyclic=kind == "R")
    data = build_module(V, kind, top + 1)
    for (i, j), k in oracle.items():
        for method in ("reduced", "direct"):
            assert koszul_betti(data, i, j, method) == k, (i, j, method)


def test_twisted_cubic():
    V = subsystem("p1:d=3")
    data = build_module(V, "R", 4)
    assert koszul_betti(data, 1, 1) == 3
    assert koszul_betti(data, 2, 1) == 2
    assert ideal_generator_degrees(V, 4) == {2: 3}


@pytest.mark.parametrize("kind", ["E", "R"])
def test_rational_quartic_matches_oracle(kind):
    forms = [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1]]
    V = make_subsystem(parse_model("p1:d=4"), Explicit.from_array(forms), P)
    oracle = resolution_betti(BinaryFormModule(forms), 5, 3, cyclic=kind == "R")
    table = betti_table(V, 3, 5, kind)
    direct = betti_table(V, 3, 4, kind, method="direct")
    for (i, j), k in oracle.items():
        assert table[(i, j)] == k
        if j <= 3:
            assert direct[(i, j)] == k


def test_eagon_northcott_rational_normal_curves():
    for d in range(2, 7):
        table = betti_table(subsystem(f"p1:d={d}"), d - 1, 3, "R")
        for i in range(1, d):
            assert table[(i, 1)] == i * comb(d, i + 1)
            assert table[(i, 2)] == 0


# --------------------------------------------------------------------------
# bookkeeping


@pytest.mark.parametrize("spec", ["p2:d=2", "p2:d=3", "hirzebruch:e=1,a=2,b=3"])
@pytest.mark.parametrize("t", [0, 1, 2])
def test_k00_and_k01(spec, t):
    V = subsystem(spec, Generic(t, t))
    table = betti_table(V, 1, 3)
    assert table[(0, 0)] == 1
    assert table[(0, 1)] == t


@pytest.mark.parametrize("spec,t", [("p2:d=2", 0), ("p2:d=3", 1), ("p2:d=3", 3),
                                    ("hirzebruch:e=0,a=2,b=2", 2), ("p1:d=5", 2)])
def test_euler_characteristic_balances(spec, t):
    V = subsystem(spec, Generic(5, t))
    ring = SectionRing(V)
    for n in range(0, 6):
        lhs, rhs = koszul_euler_check(V, ring, n)
        assert lhs == rhs


@pytest.mark.parametrize("spec,t", [("p2:d=2", 1), ("p2:d=3", 2), ("hirzebruch:e=1,a=2,b=3", 1)])
def test_direct_and_reduced_routes_agree(spec, t):
    V = subsystem(spec, Generic(1, t))
    for kind in ("E", "R"):
        a = betti_table(V, 2, 3, kind)
        b = betti_table(V, 2, 3, kind, method="direct")
        assert a.rows() == b.rows()


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6), st.integers(0, 3))
def test_betti_tables_agree_across_primes(seed, t):
    tables = []
    for q in (32003, 31991, 10007):
        V = make_subsystem(parse_model("p2:d=3"), Generic(seed, t), q)
        tables.append(betti_table(V, 2, 3).rows())
    # generic subsystems over different fields share the generic Betti table
    assert tables[0] == tables[1] == tables[2]


def test_reduced_module_rejects_out_of_range_cells():
    V = subsystem("p2:d=2")
    M = SectionRing(V).reduced_E(4)
    with pytest.raises(WindowExceeded):
        M.betti(3, 2)


# --------------------------------------------------------------------------
# verdicts, normality, regularity


def test_check_nsp_examples():
    assert check_NSp(subsystem("p2:d=3"), 1).holds_in_window
    assert check_NSp(subsystem("p2:d=3", Generic(0, 1)), 1).holds_in_window
    assert check_NSp(subsystem("hirzebruch:e=0,a=2,b=2"), 1).holds_in_window
    v = check_NSp(subsystem("p2:d=2", Generic(0, 2)), 1)
    assert v.J == 6 and v.holds_in_window == (not v.offending)
    assert "2 <= j <= 6" in v.notes[0]


def test_veronese_surface_resolution_is_linear():
    table = betti_table(subsystem("p2:d=2"), 4, 4)
    assert [table[(i, 1)] for i in range(1, 5)] == [6, 8, 3, 0]
    assert not table.nonzero(j_min=2)


def test_cubic_surface_first_failure_above_threshold():
    v = check_NSp(subsystem("p2:d=3"), 7, 3)
    assert {i for i, _, _ in v.offending} == {7}


def test_normality_examples():
    assert k_normality_defect(subsystem("p2:d=2"), 2) == 0
    V = subsystem("p2:d=3", Generic(0, 1))
    assert k_normality_defect(V, 2) == 0
    for t in range(4):
        assert k_normality_defect(subsystem("p2:d=3", Generic(t, t)), 1) == t
    with pytest.raises(ValueError):
        k_normality_defect(V, 0)


def test_regularity_examples():
    rep = regularity(subsystem("p2:d=2"))
    assert rep.reg == 2
    assert rep.levels[-1] == {"m": 2, "h1_I": 0, "h2_I": 0, "h3_I": 0}
    rep = regularity(subsystem("p2:d=3", Generic(0, 1)))
    assert rep.reg <= 3


def test_regularity_not_found():
    V = subsystem("p2:d=3", Generic(0, 5))  # projects to P^4, defects persist
    with pytest.raises(NotFoundWithinBound) as exc:
        regularity(V, bound=3)
    assert exc.value.report.to_dict()["reg"] == "not found <= 3"
    assert regularity(V, bound=3, raise_if_missing=False).reg is None


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_regularity_levels_match_closed_forms(d):
    # complete P^2 embeddings: H^2(I(k)) = h^1(O(dk)) = 0, H^3(I(k)) = h^2(O(dk)) = C(-dk-1, 2)
    rep = regularity(subsystem(f"p2:d={d}"))
    for row in rep.levels:
        k = row["m"] - 3
        assert row["h1_I"] == 0 and row["h2_I"] == 0
        assert row["h3_I"] == (comb(-d * k - 1, 2) if d * k <= -3 else 0)
    assert rep.reg == {1: 1, 2: 2, 3: 3, 4: 3}[d]


def test_ideal_generator_examples():
    assert ideal_generator_degrees(subsystem("p2:d=2"), 4) == {2: 6}
    V = subsystem("p2:d=3", Generic(0, 1))
    assert max(ideal_generator_degrees(V, 4)) <= 3


def test_ideal_generators_shortcut_matches_r_table():
    V = subsystem("p2:d=3", Generic(4, 3))
    J = 6
    gens = ideal_generator_degrees(V, J)
    table = betti_table(V, 1, J - 1, "R")
    assert gens == {j: table[(1, j - 1)] for j in range(2, J + 1) if table[(1, j - 1)]}


def test_embedding_certification():
    c = embedding_certification(subsystem("p2:d=3", Generic(0, 2)))
    assert c.level == PROVEN and c.holds
    c = embedding_certification(subsystem("hirzebruch:e=1,a=2,b=3", Generic(0, 4)))
    assert c.level == PROVEN and c.holds is False


@pytest.mark.parametrize("spec", ["p2:d=3", "hirzebruch:e=1,a=2,b=3"])
@pytest.mark.parametrize("seed", range(3))
def test_nsp1_consequences(spec, seed):
    pol = parse_model(spec)
    C = parse_curve(None, pol.model, P)
    for t in range(1, 4):
        try:
            V = make_subsystem(pol, Constrained(seed, t, min(t, C.m - 2)), P, C)
        except InfeasibleConstraint:
            continue
        ring = SectionRing(V)
        if not check_NSp(V, 1, ring=ring).holds_in_window:
            continue
        J = V.t + 4
        for k in range(t + 1, J + 1):
            assert k_normality_defect(V, k, ring) == 0
        assert max(ideal_generator_degrees(V, t + 3, ring)) <= t + 2
        assert regularity(V, ring=ring).reg <= max(3, t + 2)
