import numpy as np
import pytest
import scipy.linalg as sla

from eqcodim.algebra import (
    DecompositionDescriptor,
    end_algebra,
    q8_rep,
    z3_plus_trivial_rep,
    z3_rep,
)
from eqcodim.linalg import ToleranceError
from eqcodim.split import block_split, center_subspace, generalized_kernel, kernel_iso_class
from eqcodim.strata import jordan_block

ROT = np.array([[0.0, 1.0], [-1.0, 0.0]])


def same_span(U, V, atol=1e-8):
    if U.shape[1] != V.shape[1]:
        return False
    return np.linalg.norm(U @ U.T - V @ V.T) < atol


def random_split_input(rng, N, which):
    """Random matrix with a guaranteed gap around the spectral set."""
    k = int(rng.integers(0, N + 1))
    if which == "zero":
        inner = rng.standard_normal((k, k))
        inner = np.triu(inner, 1)  # nilpotent
        outer = np.diag(rng.choice([-1, 1], N - k) * rng.uniform(0.5, 2, N - k))
    else:
        w = rng.uniform(0.5, 2, k // 2)
        inner = sla.block_diag(*[[[0, x], [-x, 0]] for x in w]) if k >= 2 else np.zeros((0, 0))
        k = inner.shape[0]
        outer = np.diag(rng.choice([-1, 1], N - k) * rng.uniform(0.5, 2, N - k))
    D = sla.block_diag(inner, outer) if k else outer
    P = rng.standard_normal((N, N))
    while np.linalg.cond(P) > 1e2:
        P = rng.standard_normal((N, N))
    return P @ D @ np.linalg.inv(P), k


# -- subspaces --------------------------------------------------------------

def test_generalized_kernel_examples():
    assert generalized_kernel(jordan_block(2)).shape[1] == 2
    assert same_span(generalized_kernel(np.diag([0.0, 5.0])), np.array([[1.0], [0.0]]))
    assert same_span(generalized_kernel(np.array([[0.0, 1.0], [0.0, 1.0]])), np.array([[1.0], [0.0]]))


def test_center_subspace_examples():
    assert center_subspace(ROT).shape[1] == 2
    V = center_subspace(sla.block_diag([[-1.0]], ROT))
    assert same_span(V, np.eye(3)[:, 1:])
    assert center_subspace(np.eye(3)).shape[1] == 0


@pytest.mark.parametrize("N", range(1, 7))
def test_generalized_kernel_dimension_matches_power_rank(N):
    rng = np.random.default_rng(N)
    for _ in range(20):
        A, _ = random_split_input(rng, N, "zero")
        V = generalized_kernel(A)
        # oracle: ker A^N has dimension N - rank(A^N)
        AN = np.linalg.matrix_power(A, N)
        s = np.linalg.svd(AN, compute_uv=False)
        oracle = N - int(np.sum(s > 1e-8 * max(1.0, s[0])))
        assert V.shape[1] == oracle
        assert np.linalg.norm(AN @ V) < 1e-6 * max(1.0, np.linalg.norm(AN))


@pytest.mark.parametrize("N", range(1, 7))
def test_center_subspace_invariant_and_sized(N):
    rng = np.random.default_rng(100 + N)
    for _ in range(20):
        A, _ = random_split_input(rng, N, "imag")
        V = center_subspace(A)
        oracle = int(np.sum(np.abs(np.linalg.eigvals(A).real) < 1e-6))
        assert V.shape[1] == oracle
        P = V @ V.T
        assert np.linalg.norm((np.eye(N) - P) @ A @ P) <= 1e-8 * np.linalg.norm(A)


# -- block split ------------------------------------------------------------

def test_block_split_examples():
    sp = block_split(np.diag([0.0, 1.0]), "zero")
    assert np.allclose(sp.B1, [[0.0]]) and np.allclose(sp.B2, [[1.0]])
    assert np.allclose(sp.M, np.eye(2))

    A = sla.block_diag(jordan_block(2), [[3.0]])
    sp = block_split(A, "zero")
    assert np.allclose(sp.M, np.eye(3))

    sp = block_split(np.array([[0.0, 1.0], [0.0, 1.0]]), "zero")
    assert np.allclose(sp.B1, 0, atol=1e-12) and np.allclose(sp.B2, 1)
    assert np.allclose(sp.M @ np.array([[0.0, 1.0], [0.0, 1.0]]) @ np.linalg.inv(sp.M),
                       sla.block_diag(sp.B1, sp.B2))


def test_block_split_needs_gap():
    with pytest.raises(ToleranceError):
        block_split(np.diag([0.0, 1e-5, 1.0]), "zero")
    with pytest.raises(ValueError):
        block_split(np.eye(2), "left")


@pytest.mark.parametrize("which", ["zero", "imag"])
@pytest.mark.parametrize("N", range(1, 7))
def test_block_split_residual(N, which):
    rng = np.random.default_rng(7 * N + (which == "imag"))
    for _ in range(100):
        A, k = random_split_input(rng, N, which)
        sp = block_split(A, which)
        assert sp.B1.shape == (k, k)
        Minv = np.linalg.inv(sp.M)
        target = sla.block_diag(sp.B1, sp.B2) if k and k < N else (sp.B1 if k else sp.B2)
        resid = np.linalg.norm(sp.M @ A @ Minv - target) / max(1.0, np.linalg.norm(A))
        assert resid <= 1e-8 * np.linalg.cond(sp.M)
        # spectra recombine with multiplicity: char(A) = char(B1) char(B2)
        prod = np.polymul(np.poly(sp.B1) if k else [1.0], np.poly(sp.B2) if k < N else [1.0])
        assert np.allclose(prod, np.poly(A), atol=1e-6 * max(1.0, np.linalg.norm(A)) ** N)


def test_equivariant_split_respects_generators(rng):
    rep = z3_plus_trivial_rep()
    E = end_algebra(rep)
    for _ in range(10):
        A = E.random_element(rng)
        # make a zero eigenvalue on the trivial part
        A[:2, :2] = np.array([[0.0, 0.0], [0.0, 1.0]])
        sp = block_split(A, "zero", algebra=E)
        assert sp.B1.shape == (1, 1)
        assert sp.generator_residual is not None and sp.generator_residual < 1e-8
        for g in rep.generators:
            G = sp.M @ g @ np.linalg.inv(sp.M)
            assert np.linalg.norm(G[:1, 1:]) + np.linalg.norm(G[1:, :1]) < 1e-8


def test_equivariant_split_rejects_non_member(rng):
    E = end_algebra(z3_rep())
    with pytest.raises(ValueError):
        block_split(rng.standard_normal((3, 3)), "zero", algebra=E)


# -- isomorphism class of the generalized kernel ----------------------------

def test_kernel_iso_class_examples():
    rep = z3_rep()
    assert kernel_iso_class(np.eye(3), rep) == DecompositionDescriptor()
    assert kernel_iso_class(np.zeros((3, 3)), rep) == DecompositionDescriptor(((1, 1),), ((1, 2),))
    P = np.eye(3) - np.ones((3, 3)) / 3
    assert kernel_iso_class(P, rep) == DecompositionDescriptor(((1, 1),))
    assert kernel_iso_class(np.ones((3, 3)) / 3, rep) == DecompositionDescriptor((), ((1, 2),))


def test_kernel_iso_class_rejects_non_equivariant(rng):
    with pytest.raises(ValueError):
        kernel_iso_class(rng.standard_normal((3, 3)), z3_rep())


@pytest.mark.parametrize("rep, A, expected", [
    (z3_plus_trivial_rep(), sla.block_diag(np.diag([0.0, 2.0]), np.eye(2)), DecompositionDescriptor(((1, 1),))),
    (z3_plus_trivial_rep(), sla.block_diag(np.zeros((2, 2)), np.eye(2)), DecompositionDescriptor(((2, 1),))),
    (q8_rep(), np.zeros((4, 4)), DecompositionDescriptor(quat_blocks=((1, 4),))),
])
def test_kernel_iso_class_conjugation_invariant(rep, A, expected):
    rng = np.random.default_rng(21)
    E = end_algebra(rep)
    count = 0
    while count < 100:
        C = E.random_element(rng)
        if np.linalg.cond(C) > 1e3:
            continue
        count += 1
        assert kernel_iso_class(C @ A @ np.linalg.inv(C), rep) == expected
