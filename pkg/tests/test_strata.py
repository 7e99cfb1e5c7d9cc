import itertools
import json

import numpy as np
import pytest
import scipy.linalg as sla

from eqcodim.linalg import ToleranceError, is_quat_structured, quat_jordan_pairing_check, to_real_vector
from eqcodim.strata import (
    StratumLabel,
    XiLabel,
    Z_matrix,
    ambient_basis,
    ambient_real_dim,
    block_diag_partition,
    build_B_xi,
    build_I_p,
    build_quat_center_rep,
    build_real_center_rep,
    classify,
    closed_form_codim,
    enumerate_strata,
    jordan_block,
    partitions,
    representative,
    sample_stratum,
    stratum_codim,
    stratum_dimension,
    top_label,
    xi_labels,
)

from conftest import well_conditioned


def conj_sq(p):
    """Sum of squared conjugate-partition parts, i.e. dim of the nilpotent centralizer."""
    if not p:
        return 0
    return sum(sum(1 for s in p if s > i) ** 2 for i in range(max(p)))


def orbit_dim_oracle(label):
    """Real stratum dimension from centralizer dimensions of the Jordan form."""
    n, f = label.n, label.field
    if label.kind == "nilpotent":
        w = {"R": 1, "C": 2, "H": 4}[f]
        return w * (n * n - conj_sq(label.p))
    k = len(label.xi.outer)
    if f == "C":
        return 2 * (n * n - sum(conj_sq(q) for q in label.xi.inner)) + k
    cen = 2 * sum(conj_sq(q) for q in label.xi.inner)
    if f == "R":
        return n * n - cen - conj_sq(label.q) + k
    return 4 * n * n - cen - 4 * conj_sq(label.q) + k


def xi_count_oracle(m):
    """Multisets of block types (s, partition of s) of total size m."""
    if m == 0:
        return 1
    types = [(s, q) for s in range(1, m + 1) for q in partitions(s)]
    count = 0
    for r in range(1, m + 1):
        for combo in itertools.combinations_with_replacement(types, r):
            if sum(s for s, _ in combo) == m:
                count += 1
    return count


def label_count_oracle(field, n, kind):
    if kind == "nilpotent":
        return len(partitions(n))
    if field == "C":
        return xi_count_oracle(n)
    step = 2 if field == "R" else 1
    return sum(xi_count_oracle(m) * len(partitions(n - step * m)) for m in range(n // step + 1))


ALL_CASES = [(f, n, k) for f in "RCH" for n in range(1, 5) for k in ("nilpotent", "center")]


# -- builders ---------------------------------------------------------------

def test_jordan_block_examples():
    assert np.array_equal(jordan_block(2, 0), [[0, 1], [0, 0]])
    assert np.array_equal(block_diag_partition((1, 1), 0), np.zeros((2, 2)))
    expected = sla.block_diag(jordan_block(2, 1j), jordan_block(1, 1j))
    assert np.array_equal(block_diag_partition((2, 1), 1j), expected)
    with pytest.raises(ValueError):
        block_diag_partition(())
    with pytest.raises(ValueError):
        jordan_block(0)


def test_build_B_xi_examples():
    assert np.allclose(build_B_xi(XiLabel((1, 1), ((1,), (1,))), [1, -1]), np.diag([1j, -1j]))
    assert np.allclose(build_B_xi(XiLabel((2,), ((2,),)), [3]), jordan_block(2, 3j))
    assert np.allclose(build_B_xi(XiLabel((1, 1), ((1,), (1,))), [0, 0]), 0)
    with pytest.raises(ValueError):
        build_B_xi(XiLabel((1, 1), ((1,), (1,))), [2, 2])


def test_build_I_p_examples():
    assert np.allclose(build_I_p((2, 1), [3, 5]), np.diag([3, 3, 5]))
    assert not np.any(build_I_p((2, 1), [0, 0]))
    z = np.array([1.0, 2j, -3])
    assert np.allclose(build_I_p((1, 1, 1), z), np.diag(z))
    with pytest.raises(ValueError):
        build_I_p((2, 1), [1])


def test_real_center_rep_2x2():
    w = 1.7
    Z = Z_matrix(2, 1)
    # hand computation of Z diag(wi, -wi) Z^-1
    hand = Z @ np.diag([w * 1j, -w * 1j]) @ np.linalg.inv(Z)
    assert np.allclose(hand.imag, 0)
    got = build_real_center_rep(2, 1, XiLabel((1,), ((1,),)), (), [w])
    assert got.dtype == float
    assert np.allclose(got, hand.real)
    assert np.allclose(got, [[0, w], [-w, 0]]) or np.allclose(got, [[0, -w], [w, 0]])


def test_real_center_rep_3x3_spectrum():
    M = build_real_center_rep(3, 1, XiLabel((1,), ((1,),)), (1,), [1.0])
    assert M.dtype == float
    ev = np.sort_complex(np.linalg.eigvals(M))
    assert np.allclose(ev, np.sort_complex(np.array([-1j, 0, 1j])), atol=1e-12)


def test_real_center_rep_errors():
    xi = XiLabel((1, 1), ((1,), (1,)))
    with pytest.raises(ValueError):
        build_real_center_rep(3, 2, xi, (), [1, 2])
    with pytest.raises(ValueError):
        build_real_center_rep(4, 2, xi, (), [1, 1])
    with pytest.raises(ValueError):
        build_real_center_rep(4, 2, xi, (), [-1, 1])


def test_quat_center_rep_examples():
    one = XiLabel((1,), ((1,),))
    assert np.allclose(build_quat_center_rep(1, 1, one, (), [1.0]), np.diag([1j, -1j]))
    M = build_quat_center_rep(2, 1, one, (1,), [2.0])
    assert M.shape == (4, 4)
    assert is_quat_structured(M)
    assert np.allclose(M, np.diag([2j, 0, -2j, 0]))
    assert quat_jordan_pairing_check(M)
    with pytest.raises(ValueError):
        build_quat_center_rep(1, 2, XiLabel((1, 1), ((1,), (1,))), (), [1, 2])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_quat_center_reps_are_structured(n):
    for lab in enumerate_strata("H", n, "center"):
        M = representative(lab)
        S = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
        assert np.array_equal(S @ M, M.conj() @ S)
        assert quat_jordan_pairing_check(M)


# -- labels and enumeration -------------------------------------------------

def test_xi_label_canonical_form():
    a = XiLabel.from_blocks([(1, (1,)), (2, (1, 1))])
    b = XiLabel.from_blocks([(2, (1, 1)), (1, (1,))])
    assert a == b and a.outer == (2, 1) and a.is_canonical()
    with pytest.raises(ValueError):
        XiLabel((1, 2), ((1,), (2,)))
    with pytest.raises(ValueError):
        XiLabel((2,), ((1,),))


@pytest.mark.parametrize("m", range(0, 6))
def test_xi_labels_match_multiset_count(m):
    labs = xi_labels(m)
    assert len(labs) == len(set(labs)) == xi_count_oracle(m)
    assert all(x.is_canonical() and x.size == m for x in labs)


def test_enumerate_small_examples():
    assert [lab.p for lab in enumerate_strata("C", 2, "nilpotent")] == [(2,), (1, 1)]
    xis = {lab.xi for lab in enumerate_strata("C", 2, "center")}
    assert xis == {XiLabel((2,), ((2,),)), XiLabel((2,), ((1, 1),)), XiLabel((1, 1), ((1,), (1,)))}
    # R, n=2: one pair of imaginary eigenvalues, or both eigenvalues at zero
    r2 = enumerate_strata("R", 2, "center")
    assert [(lab.m, lab.q) for lab in r2] == [(1, ()), (0, (2,)), (0, (1, 1))]


@pytest.mark.parametrize("field, n, kind", ALL_CASES + [("C", 5, "center"), ("R", 6, "center")])
def test_enumeration_complete_and_unique(field, n, kind):
    labs = enumerate_strata(field, n, kind)
    assert len(labs) == len(set(labs)) == label_count_oracle(field, n, kind)
    assert top_label(field, n, kind) in labs


@pytest.mark.parametrize("field, n, kind", ALL_CASES)
def test_label_json_round_trip(field, n, kind):
    for lab in enumerate_strata(field, n, kind):
        d = json.loads(json.dumps(lab.to_dict()))
        assert StratumLabel.from_dict(d) == lab


def test_label_json_shape():
    lab = StratumLabel("C", "center", 3, xi=XiLabel((2, 1), ((2,), (1,))))
    assert lab.to_dict() == {"field": "C", "kind": "center", "n": 3,
                             "xi": {"outer": [2, 1], "inner": [[2], [1]]}}


def test_label_validation():
    with pytest.raises(ValueError):
        StratumLabel("R", "nilpotent", 3, p=(2,))
    with pytest.raises(ValueError):
        StratumLabel("Q", "nilpotent", 1, p=(1,))
    with pytest.raises(ValueError):
        StratumLabel("R", "center", 3, xi=XiLabel((1, 1), ((1,), (1,))), m=2, q=())


# -- dimensions -------------------------------------------------------------

@pytest.mark.parametrize("label, dim", [
    (StratumLabel("C", "nilpotent", 3, p=(3,)), 12),
    (top_label("R", 2, "center"), 3),
    (StratumLabel("H", "nilpotent", 2, p=(2,)), 8),
])
def test_dimension_examples(label, dim):
    measured, closed = stratum_dimension(label)
    assert measured == closed == dim


@pytest.mark.parametrize("field, n, kind, codim", [
    ("R", 3, "nilpotent", 3), ("C", 2, "center", 2), ("H", 2, "center", 2),
])
def test_codim_examples(field, n, kind, codim):
    assert stratum_codim(top_label(field, n, kind)) == codim


@pytest.mark.parametrize("field, n, kind", ALL_CASES)
def test_every_stratum_matches_centralizer_oracle(field, n, kind):
    rng = np.random.default_rng(7)
    for lab in enumerate_strata(field, n, kind):
        expected = orbit_dim_oracle(lab)
        # independence of the sampled parameters
        for _ in range(3):
            measured, _ = stratum_dimension(lab, sample_stratum(lab, rng))
            assert measured == expected, str(lab)


@pytest.mark.parametrize("field, n, kind", ALL_CASES)
def test_top_stratum_is_unique_maximum(field, n, kind):
    top = top_label(field, n, kind)
    top_dim, closed = stratum_dimension(top)
    assert top_dim == closed
    assert ambient_real_dim(field, n) - top_dim == closed_form_codim(field, n, kind)
    for lab in enumerate_strata(field, n, kind):
        if lab != top:
            assert stratum_dimension(lab)[0] < top_dim


def test_sample_must_match_label():
    a, b = enumerate_strata("R", 2, "nilpotent")
    with pytest.raises(ValueError):
        stratum_dimension(a, sample_stratum(b, 0))


@pytest.mark.parametrize("xi", [xi for m in (2, 3) for xi in xi_labels(m)])
def test_block_scalar_directions_are_not_tangent(xi):
    # block scalar matrices are never commutators with B_xi(x)
    rng = np.random.default_rng(3)
    n = xi.size
    x = np.arange(1, len(xi.outer) + 1) + 0.01 * rng.uniform(size=len(xi.outer))
    B = build_B_xi(xi, x)
    T = np.array([to_real_vector(V @ B - B @ V) for V in ambient_basis("C", n)]).T
    for _ in range(5):
        z = rng.standard_normal(len(xi.outer)) + 1j * rng.standard_normal(len(xi.outer))
        v = to_real_vector(build_I_p(xi.outer, z))
        resid = v - T @ np.linalg.lstsq(T, v, rcond=None)[0]
        assert np.linalg.norm(resid) > 1e-3 * np.linalg.norm(v)


# -- classification ---------------------------------------------------------

def test_classify_examples():
    assert classify(jordan_block(2), "R") == StratumLabel("R", "nilpotent", 2, p=(2,))
    rot = np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert classify(rot, "R") == StratumLabel("R", "center", 2, xi=XiLabel((1,), ((1,),)), m=1, q=())
    assert classify(np.eye(2), "R") is None


def test_classify_zero_matrix_as_center():
    lab = classify(np.zeros((2, 2)), "R", kind="center")
    assert lab == StratumLabel("R", "center", 2, xi=XiLabel((), ()), m=0, q=(1, 1))


def test_classify_refuses_near_boundary():
    M = np.diag([5e-6, 1.0j, -1.0j]).astype(complex)
    with pytest.raises(ToleranceError):
        classify(M, "C")


def test_classify_rejects_bad_input():
    with pytest.raises(ValueError):
        classify(np.ones((2, 3)), "R")
    with pytest.raises(ValueError):
        classify(np.diag([1.0, 2.0]), "H")


@pytest.mark.parametrize("field, n, kind", ALL_CASES)
def test_classify_round_trip(field, n, kind):
    for lab in enumerate_strata(field, n, kind):
        assert classify(sample_stratum(lab, 11).matrix, field, kind=kind) == lab


@pytest.mark.parametrize("field", ["R", "C", "H"])
def test_classify_conjugation_invariant(field):
    rng = np.random.default_rng({"R": 1, "C": 2, "H": 3}[field])
    cases = [lab for n in (1, 2, 3) for kind in ("nilpotent", "center")
             for lab in enumerate_strata(field, n, kind)]
    for i in range(100):
        lab = cases[i % len(cases)]
        M = sample_stratum(lab, rng).matrix
        C = well_conditioned(field, lab.n, rng)
        assert classify(C @ M @ np.linalg.inv(C), field, kind=lab.kind) == lab


def test_repeated_eigenvalue_drops_out_of_top_C_center():
    top = top_label("C", 3, "center")
    assert classify(np.diag([1j, 2j, 3j]), "C") == top
    lab = classify(np.diag([1j, 1j, 3j]), "C")
    assert lab != top
    assert lab.xi == XiLabel((2, 1), ((1, 1), (1,)))
    assert stratum_dimension(lab)[0] < stratum_dimension(top)[0]
