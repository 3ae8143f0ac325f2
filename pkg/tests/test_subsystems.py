from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nspcheck.linalg import kernel_basis, rank
from nspcheck.models import parse_curve, parse_model
from nspcheck.subsystems import (ASSUMED, MONTE_CARLO, PROVEN, Complete, Constrained, Explicit,
                                 Generic, InfeasibleConstraint, RankDeficiency, SubsystemError,
                                 base_point_free_check, binary_forms_gcd_degree, embedding_obstruction,
                                 generation_degree, lambda_dimension, make_subsystem, parse_subsystem,
                                 restriction_image_codim, very_ample_certification)

P = 32003
MODELS = ["p2:d=3", "p2:d=4", "hirzebruch:e=0,a=2,b=2", "hirzebruch:e=1,a=2,b=3",
          "hirzebruch:e=2,a=2,b=5"]


def setup(spec):
    pol = parse_model(spec)
    return pol, parse_curve(None, pol.model, P)


# --------------------------------------------------------------------------
# construction


def test_complete_p2_d3():
    V = make_subsystem(parse_model("p2:d=3"), Complete(), P)
    assert V.t == 0 and V.dim == 10
    assert np.array_equal(V.basis, np.eye(10, dtype=np.int64))
    with pytest.raises(ValueError):
        V.basis[0, 0] = 3


def test_generic_dimension_contract():
    V = make_subsystem(parse_model("p2:d=3"), Generic(7, 2), P)
    assert V.dim == 8 and V.t == 2 and V.r == 7
    assert rank(V.basis, P) == 8
    assert V.seed == 7


def test_generic_is_seeded():
    pol = parse_model("p2:d=3")
    a = make_subsystem(pol, Generic(3, 2), P).basis
    b = make_subsystem(pol, Generic(3, 2), P).basis
    c = make_subsystem(pol, Generic(4, 2), P).basis
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_constrained_example():
    pol, C = setup("p2:d=4")
    V = make_subsystem(pol, Constrained(1, 3, 2), P, C)
    assert V.t == 3
    assert restriction_image_codim(V, C).codim == 2


@pytest.mark.parametrize("spec", MODELS)
@pytest.mark.parametrize("seed", range(3))
def test_constrained_postcondition_exact(spec, seed):
    pol, C = setup(spec)
    for t in range(0, 5):
        for rc in range(0, C.m + 1):
            try:
                V = make_subsystem(pol, Constrained(seed, t, rc), P, C)
            except InfeasibleConstraint:
                continue
            data = restriction_image_codim(V, C)
            assert data.codim == rc and V.t == t
            assert data.kernel_dim + data.image_rank == V.dim


def test_constrained_infeasible():
    pol, C = setup("p2:d=3")
    with pytest.raises(InfeasibleConstraint):
        make_subsystem(pol, Constrained(0, 1, 3), P, C)  # a hyperplane costs at most 1
    with pytest.raises(SubsystemError):
        make_subsystem(pol, Constrained(0, 1, 1), P)  # no curve


def test_explicit_and_errors():
    pol = parse_model("p2:d=2")
    V = make_subsystem(pol, Explicit.from_array(np.eye(6, dtype=np.int64)[:5]), P)
    assert V.t == 1
    with pytest.raises(RankDeficiency):
        make_subsystem(pol, Explicit.from_array([[1, 0, 0, 0, 0, 0]] * 2), P)
    with pytest.raises(SubsystemError):
        make_subsystem(pol, Explicit.from_array([[1, 0, 0]]), P)
    with pytest.raises(SubsystemError):
        make_subsystem(pol, Generic(0, 3), P)  # fewer than 4 sections on a surface
    with pytest.raises(SubsystemError):
        make_subsystem(pol, Generic(0, -1), P)


def test_parse_subsystem(tmp_path):
    assert parse_subsystem("complete") == Complete()
    assert parse_subsystem("generic:t=2,seed=7") == Generic(7, 2)
    assert parse_subsystem("constrained:t=3,rc=2,seed=1") == Constrained(1, 3, 2)
    f = tmp_path / "v.json"
    f.write_text(json.dumps([[1, 0, 0], [0, 0, 1]]))
    spec = parse_subsystem(f"file:{f}")
    assert isinstance(spec, Explicit) and spec.matrix == ((1, 0, 0), (0, 0, 1))
    f.write_text(json.dumps({"rows": [[1, 2, 3]]}))
    assert parse_subsystem(f"file:{f}").matrix == ((1, 2, 3),)
    for bad in ("generic:seed=1", "bogus", "generic:t=x"):
        with pytest.raises(SubsystemError):
            parse_subsystem(bad)


# --------------------------------------------------------------------------
# restriction data


def test_restriction_examples():
    pol, C = setup("p2:d=3")
    assert restriction_image_codim(make_subsystem(pol, Complete(), P), C).codim == 0
    assert restriction_image_codim(make_subsystem(pol, Generic(0, 1), P), C).codim == 0
    K = kernel_basis(C.restriction_matrix(pol.L, P), P)  # forms vanishing on C
    V = make_subsystem(pol, Explicit.from_array(K), P)
    data = restriction_image_codim(V, C)
    assert data.codim == 2 * 3 + 1 and data.kernel_dim == V.dim == 3


@pytest.mark.parametrize("spec", MODELS)
@given(seed=st.integers(0, 10 ** 6), t=st.integers(0, 5))
def test_restriction_invariants(spec, seed, t):
    pol, C = setup(spec)
    t = min(t, pol.h0 - 4)
    V = make_subsystem(pol, Generic(seed, t), P)
    data = restriction_image_codim(V, C)
    assert data.codim <= min(t, data.degree + 1) or data.codim <= t
    assert data.kernel_dim + data.image_rank == V.dim
    if t == 0 and pol.model.cohomology_table(pol.model.sub(pol.L, C.cls))[1] == 0:
        assert data.codim == 0


@pytest.mark.parametrize("spec", MODELS)
def test_lambda_dimension_identity(spec):
    pol, C = setup(spec)
    kappa = pol.model.h0(pol.model.sub(pol.L, C.cls))
    assert lambda_dimension(pol, C, P) == pol.h0 - kappa - 1


# --------------------------------------------------------------------------
# base points and embeddings


def test_binary_base_point_examples():
    u4, v4, u3v = [1, 0, 0, 0, 0], [0, 0, 0, 0, 1], [0, 1, 0, 0, 0]
    c = base_point_free_check(np.array([u4, v4]), prime=P)
    assert c.level == PROVEN and c.holds
    c = base_point_free_check(np.array([u4, u3v]), prime=P)
    assert c.level == PROVEN and not c.holds


def test_gcd_degree_counts_both_coordinate_points():
    assert binary_forms_gcd_degree(np.array([[1, 0, 0, 0, 0], [0, 1, 0, 0, 0]]), P) == 3  # u^3 common
    assert binary_forms_gcd_degree(np.array([[0, 1, 0, 0, 0], [0, 0, 1, 0, 0]]), P) == 3  # u^2 v common
    assert binary_forms_gcd_degree(np.array([[0, 0, 0, 1, 0], [0, 0, 0, 0, 1]]), P) == 3  # v^3 common
    assert binary_forms_gcd_degree(np.array([[1, 0, 0, 0, 0], [0, 0, 0, 0, 1]]), P) == 0
    # (u - v)(u + v) and (u - v)(u + 2v) share u - v
    f = [1, 0, P - 1]
    g = [1, 1, P - 2]
    assert binary_forms_gcd_degree(np.array([f, g]), P) == 1


@given(st.integers(0, 10 ** 6), st.integers(1, 8))
def test_gcd_degree_of_multiples(seed, n):
    rng = np.random.default_rng(seed)
    h = rng.integers(1, P, size=2)  # common linear factor
    rows = [np.convolve(h, rng.integers(0, P, size=n)) % P for _ in range(2)]
    assert binary_forms_gcd_degree(np.array(rows), P) >= 1


def test_surface_base_point_check_levels():
    V = make_subsystem(parse_model("p2:d=3"), Generic(0, 1), P)
    assert base_point_free_check(V).level == MONTE_CARLO
    c = base_point_free_check(V, exact=True)
    assert c.level == PROVEN and c.holds
    # all cubics through [0:0:1]: every monomial with z-degree 3 is dropped
    pol = parse_model("p2:d=3")
    keep = [i for i, e in enumerate(pol.model.piece((3,)).exps) if e[2] != 3]
    V = make_subsystem(pol, Explicit.from_array(np.eye(10, dtype=np.int64)[keep]), P)
    assert generation_degree(V) is None
    c = base_point_free_check(V, exact=True)
    assert c.level == PROVEN and c.holds is False


def test_embedding_obstructions():
    pol = parse_model("p2:d=3")
    assert embedding_obstruction(make_subsystem(pol, Generic(0, 5), P)) is not None  # P^4
    assert embedding_obstruction(make_subsystem(pol, Generic(0, 4), P)) is None  # P^5
    scroll = parse_model("hirzebruch:e=1,a=1,b=2")  # cubic scroll in P^4
    assert embedding_obstruction(make_subsystem(scroll, Complete(), P)) is None
    f1 = parse_model("hirzebruch:e=1,a=2,b=3")
    assert "double point" in embedding_obstruction(make_subsystem(f1, Generic(0, 4), P))
    c = very_ample_certification(make_subsystem(f1, Generic(0, 1), P))
    assert c.level == ASSUMED and c.holds is None
    assert very_ample_certification(make_subsystem(f1, Complete(), P)).holds
