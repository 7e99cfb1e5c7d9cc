"""Spectral splittings: generalized kernels, center subspaces, block splits."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import (
    DecompositionDescriptor,
    EndAlgebraBasis,
    MonoidRepresentation,
    decomposition_descriptor,
)
from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    ToleranceError,
    canonical_basis,
    invariant_subspace,
)

SPECTRAL_SETS = ("zero", "imag")


def _distance_to_set(mu: complex, which: str) -> float:
    return abs(mu) if which == "zero" else abs(mu.real)


def _selector(which: str):
    if which not in SPECTRAL_SETS:
        raise ValueError(f"spectral set must be one of {SPECTRAL_SETS}")

    def select(mu, size, radius):
        d = _distance_to_set(mu, which)
        if radius < d < 10 * radius:
            raise ToleranceError(f"eigenvalue {mu} is too close to the {which} set to decide")
        return d <= radius

    return select


def spectral_subspace(A, which: str, tol: ToleranceConfig = DEFAULT_TOL):
    """Basis of the invariant subspace for ``which`` plus the two eigenvalue lists."""
    return invariant_subspace(A, _selector(which), tol)


def generalized_kernel(A, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the generalized eigenspace of the eigenvalue 0."""
    return spectral_subspace(A, "zero", tol)[0]


def center_subspace(A, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the generalized eigenspaces of imaginary eigenvalues."""
    return spectral_subspace(A, "imag", tol)[0]


@dataclass
class SpectralSplit:
    """``M A M^-1 = diag(B1, B2)`` with ``spec(B1)`` in the chosen set."""

    M: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    Z_descriptor: str
    residual: float
    generator_residual: Optional[float] = None


def _projector_basis(P, tol):
    u, s, _ = np.linalg.svd(P)
    k = int(np.sum(s > 0.5))
    return canonical_basis(u[:, :k])


def block_split(A, Z_descriptor: str = "zero", tol: ToleranceConfig = DEFAULT_TOL,
                algebra: Optional[EndAlgebraBasis] = None) -> SpectralSplit:
    """Split ``A`` along the spectral set ``"zero"`` or ``"imag"``.

    With ``algebra`` the spectral projector is expressed in ``End(W)``
    coordinates and certified there, so both halves are subrepresentations
    and every generator of ``algebra.rep`` is block diagonal in the new basis.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    N = A.shape[0]
    scale = max(np.linalg.norm(A, 2), np.finfo(float).tiny)
    V1, sel, other = spectral_subspace(A, Z_descriptor, tol)
    gap = min((_distance_to_set(complex(mu), Z_descriptor) for mu in other), default=np.inf)
    if gap <= 100 * tol.cluster_tol * scale:
        raise ToleranceError(f"no spectral gap: nearest outside eigenvalue at distance {gap:.3e}")
    k = V1.shape[1]
    sel_fn = _selector(Z_descriptor)
    V2 = invariant_subspace(A, lambda mu, s, r: not sel_fn(mu, s, r), tol)[0]
    Vfull = np.hstack([V1, V2])
    gen_res = None
    if algebra is not None:
        if algebra.membership_residual(A) > tol.residual_tol:
            raise ValueError("A is not in the supplied endomorphism algebra")
        P = Vfull[:, :k] @ np.linalg.inv(Vfull)[:k, :]
        P_alg = algebra.from_coords(algebra.coords(P.real))
        if np.linalg.norm(P_alg - P) > tol.residual_tol * max(1.0, np.linalg.norm(P)) * N:
            raise ToleranceError("spectral projector is not in the endomorphism algebra")
        V1 = _projector_basis(P_alg, tol)
        V2 = _projector_basis(np.eye(N) - P_alg, tol)
        Vfull = np.hstack([V1, V2])
    if Vfull.shape[1] != N:
        raise ToleranceError("invariant subspaces do not span the whole space")
    M = np.linalg.inv(Vfull)
    B = M @ A @ Vfull
    off = np.linalg.norm(B[:k, k:]) + np.linalg.norm(B[k:, :k])
    res = float(off / max(np.linalg.norm(A), np.finfo(float).tiny))
    if res > tol.residual_tol * max(1.0, np.linalg.cond(Vfull)):
        raise ToleranceError(f"splitting residual {res:.3e} too large")
    if algebra is not None and algebra.rep is not None and algebra.rep.generators:
        gen_res = 0.0
        for g in algebra.rep.generators:
            G = M @ g @ Vfull
            gen_res = max(gen_res, float((np.linalg.norm(G[:k, k:]) + np.linalg.norm(G[k:, :k]))
                                         / max(np.linalg.norm(g), 1.0)))
        if gen_res > tol.residual_tol * max(1.0, np.linalg.cond(Vfull)):
            raise ToleranceError("generators are not block diagonal after the split")
    return SpectralSplit(M, B[:k, :k], B[k:, k:], Z_descriptor, res, gen_res)


def kernel_iso_class(A, rep: MonoidRepresentation, tol: ToleranceConfig = DEFAULT_TOL,
                     seed: int = 0) -> DecompositionDescriptor:
    """Descriptor of the generalized kernel of an equivariant ``A`` as a subrepresentation."""
    A = np.asarray(A, float)
    if A.shape != (rep.dim, rep.dim):
        raise ValueError("A has the wrong size")
    nA = max(np.linalg.norm(A), 1.0)
    for g in rep.generators:
        if np.linalg.norm(A @ g - g @ A) > tol.residual_tol * nA * max(np.linalg.norm(g), 1.0) * 1e2:
            raise ValueError("A does not commute with the representation")
    V = generalized_kernel(A, tol)
    if V.shape[1] == 0:
        return DecompositionDescriptor()
    return decomposition_descriptor(rep.restrict(V), tol, seed)
