"""Equivariant endomorphism algebras and their Wedderburn data.

Given the matrices of a finitely generated monoid acting on ``R^N`` we
compute the commutant ``End(W)``, its radical, the simple blocks of the
semisimple quotient and, for each block, the division algebra type,
the multiplicity and the dimension of the corresponding indecomposable
summand.

Elements of the quotient are handled through a fixed complement of the
radical inside ``End(W)`` (orthogonal for the Frobenius inner product), so
everything reduces to linear algebra on coordinate vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    ToleranceError,
    cluster_eigenvalues,
    null_space,
    numerical_rank,
    power_trace_equal,
    sylvester_operator,
)

MAX_RETRIES = 16


@dataclass
class MonoidRepresentation:
    """Generator matrices ``phi(sigma)`` on ``R^dim``; the identity is implied."""

    dim: int
    generators: List[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError("dimension must be positive")
        self.dim = int(self.dim)
        gens = []
        for g in self.generators:
            g = np.asarray(g, dtype=float)
            if g.shape != (self.dim, self.dim):
                raise ValueError(f"generator of shape {g.shape}, expected {(self.dim, self.dim)}")
            if not np.all(np.isfinite(g)):
                raise ValueError("generator entries must be finite")
            gens.append(g)
        self.generators = gens

    def conjugate(self, C) -> "MonoidRepresentation":
        Ci = np.linalg.inv(C)
        return MonoidRepresentation(self.dim, [C @ g @ Ci for g in self.generators])

    def restrict(self, V) -> "MonoidRepresentation":
        """Action on the invariant subspace spanned by the orthonormal columns of ``V``."""
        V = np.asarray(V, float)
        return MonoidRepresentation(V.shape[1], [V.T @ g @ V for g in self.generators])


@dataclass(frozen=True)
class DecompositionDescriptor:
    """Isotypic data ``(multiplicity, indecomposable dim)`` per division type."""

    real_blocks: Tuple[Tuple[int, int], ...] = ()
    complex_blocks: Tuple[Tuple[int, int], ...] = ()
    quat_blocks: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        for name in ("real_blocks", "complex_blocks", "quat_blocks"):
            blocks = tuple(sorted((int(m), int(d)) for m, d in getattr(self, name)))
            if any(m < 1 or d < 1 for m, d in blocks):
                raise ValueError("multiplicities and dimensions must be >= 1")
            object.__setattr__(self, name, blocks)

    @property
    def total_dim(self) -> int:
        return sum(m * d for bl in (self.real_blocks, self.complex_blocks, self.quat_blocks)
                   for m, d in bl)

    @property
    def r(self) -> List[int]:
        return [m for m, _ in self.real_blocks]

    @property
    def c(self) -> List[int]:
        return [m for m, _ in self.complex_blocks]

    @property
    def h(self) -> List[int]:
        return [m for m, _ in self.quat_blocks]

    def to_dict(self):
        fmt = lambda bl: [{"mult": m, "dim": d} for m, d in bl]
        return {"real": fmt(self.real_blocks), "complex": fmt(self.complex_blocks),
                "quaternionic": fmt(self.quat_blocks)}

    @classmethod
    def from_dict(cls, d) -> "DecompositionDescriptor":
        get = lambda key: tuple((int(e["mult"]), int(e.get("dim", 1))) for e in d.get(key, []))
        return cls(get("real"), get("complex"), get("quaternionic"))


# ---------------------------------------------------------------------------
# End(W) and its radical
# ---------------------------------------------------------------------------

class EndAlgebraBasis:
    """Frobenius-orthonormal basis of ``End(W)`` with radical and quotient data.

    Attributes
    ----------
    basis : list of ndarray
        Orthonormal basis of the commutant.
    radical_basis : list of ndarray or None
        Orthonormal basis of the radical, once computed.
    """

    def __init__(self, basis: Sequence[np.ndarray], radical_basis=None, rep=None):
        self.basis = [np.asarray(b, float) for b in basis]
        self.N = self.basis[0].shape[0] if self.basis else 0
        self._B = np.array([b.ravel() for b in self.basis])  # rows
        self.radical_basis = radical_basis
        self.rep = rep
        self._quotient = None

    @property
    def dim_end(self) -> int:
        return len(self.basis)

    @property
    def dim_radical(self) -> int:
        return 0 if self.radical_basis is None else len(self.radical_basis)

    def coords(self, X) -> np.ndarray:
        return self._B @ np.asarray(X, float).ravel()

    def from_coords(self, c) -> np.ndarray:
        return (np.asarray(c) @ self._B).reshape(self.N, self.N)

    def membership_residual(self, X) -> float:
        X = np.asarray(X, float)
        nx = np.linalg.norm(X)
        if nx == 0:
            return 0.0
        return float(np.linalg.norm(X - self.from_coords(self.coords(X))) / nx)

    def random_element(self, rng) -> np.ndarray:
        return self.from_coords(rng.standard_normal(self.dim_end))

    @property
    def quotient(self) -> "SemisimpleQuotient":
        if self.radical_basis is None:
            self.radical_basis = radical(self)
        if self._quotient is None:
            self._quotient = SemisimpleQuotient(self)
        return self._quotient


def end_algebra(rep: MonoidRepresentation, tol: ToleranceConfig = DEFAULT_TOL) -> EndAlgebraBasis:
    """Joint kernel of ``X -> X A_g - A_g X`` over all generators."""
    N = rep.dim
    if rep.generators:
        L = np.vstack([sylvester_operator(g, g) for g in rep.generators])
        K = null_space(L, tol)
    else:
        K = np.eye(N * N)
    basis = [K[:, j].real.reshape(N, N, order="F") for j in range(K.shape[1])]
    return EndAlgebraBasis(basis, rep=rep)


def radical(E: EndAlgebraBasis, tol: ToleranceConfig = DEFAULT_TOL) -> List[np.ndarray]:
    """Kernel of the trace form ``tr(x y)`` on ``E``; every element is checked nilpotent."""
    k = E.dim_end
    G = np.empty((k, k))
    for a in range(k):
        for b in range(a, k):
            G[a, b] = G[b, a] = np.trace(E.basis[a] @ E.basis[b])
    K = null_space(G, tol, scale=max(1.0, np.abs(G).max()))
    out = []
    for j in range(K.shape[1]):
        x = E.from_coords(K[:, j].real)
        nx = np.linalg.norm(x, 2)
        if np.linalg.norm(np.linalg.matrix_power(x / nx, E.N), 2) > math.sqrt(tol.residual_tol):
            raise ToleranceError("trace form kernel element is not nilpotent")
        out.append(x)
    return out


def lift_idempotent(e, tol: ToleranceConfig = DEFAULT_TOL, max_iter: Optional[int] = None) -> np.ndarray:
    """Exact idempotent congruent to ``e`` modulo a nilpotent ideal.

    Iterates ``e <- 3e^2 - 2e^3``; the defect ``e^2 - e`` squares at each step.
    """
    e = np.asarray(e, float)
    N = e.shape[0]
    steps = (max_iter if max_iter is not None else math.ceil(math.log2(max(N, 2))) + 6)
    for _ in range(steps + 1):
        e2 = e @ e
        if np.linalg.norm(e2 - e) <= tol.residual_tol * max(1.0, np.linalg.norm(e)):
            return e
        e = 3 * e2 - 2 * e2 @ e
    raise ToleranceError("idempotent lifting did not converge")


# ---------------------------------------------------------------------------
# Semisimple quotient
# ---------------------------------------------------------------------------

def _orth(M, tol):
    """Orthonormal basis of the column space of ``M``."""
    if M.size == 0:
        return np.zeros((M.shape[0], 0))
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0:
        return np.zeros((M.shape[0], 0))
    return u[:, s > tol.rank_tol * s[0]]


def _spectral_groups(L, tol: ToleranceConfig):
    """Real spectral projectors of ``L`` for each real eigenvalue or conjugate pair."""
    w, V = np.linalg.eig(L)
    scale = max(np.linalg.norm(L, 2), 1e-300)
    clusters = cluster_eigenvalues(w, scale, tol)
    means = [complex(np.mean(w[idx])) for idx in clusters]
    rad = [max(tol.cluster_radius(len(idx), scale), 1e-7 * scale) for idx in clusters]
    used, groups = set(), []
    for a, idx in enumerate(clusters):
        if a in used:
            continue
        used.add(a)
        members = list(idx)
        if abs(means[a].imag) > rad[a]:
            partner = [b for b in range(len(clusters)) if b not in used
                       and abs(means[b] - means[a].conjugate()) <= rad[a] + rad[b]]
            if len(partner) != 1:
                raise ToleranceError("unpaired non-real eigenvalue")
            used.add(partner[0])
            members += list(clusters[partner[0]])
        groups.append((means[a], members))
    Vi = np.linalg.inv(V)
    projs = []
    for mu, members in groups:
        P = V[:, members] @ Vi[members, :]
        projs.append((mu, P.real))
    return projs


class SemisimpleQuotient:
    """Structure constants of ``End(W) / radical`` on the orthogonal complement."""

    def __init__(self, E: EndAlgebraBasis, tol: ToleranceConfig = DEFAULT_TOL):
        self.E = E
        self.tol = tol
        k = E.dim_end
        if E.radical_basis:
            R = np.array([E.coords(x) for x in E.radical_basis]).T
            comp = null_space(R.T, tol, scale=1.0).real
        else:
            comp = np.eye(k)
        self.comp_coords = comp  # columns: complement basis in End coordinates
        self.basis = [E.from_coords(comp[:, j]) for j in range(comp.shape[1])]
        s = len(self.basis)
        self.dim = s
        self.T = np.empty((s, s, s))
        for a in range(s):
            for b in range(s):
                self.T[a, b] = self.project(self.basis[a] @ self.basis[b])
        self.unit = self.project(np.eye(E.N))

    def project(self, X) -> np.ndarray:
        """Coordinates of the class of ``X`` in the complement basis."""
        return self.comp_coords.T @ self.E.coords(X)

    def lift(self, c) -> np.ndarray:
        return sum((ci * b for ci, b in zip(c, self.basis)), np.zeros((self.E.N, self.E.N)))

    def mul(self, x, y) -> np.ndarray:
        return np.einsum("a,b,abc->c", x, y, self.T)

    def left_op(self, x) -> np.ndarray:
        """Matrix of ``y -> x y`` in quotient coordinates."""
        return np.einsum("a,abc->cb", x, self.T)

    def right_op(self, x) -> np.ndarray:
        return np.einsum("b,abc->ca", x, self.T)

    def center(self) -> np.ndarray:
        """Columns span the center of the quotient."""
        if self.dim == 0:
            return np.zeros((0, 0))
        C = np.vstack([(self.T[:, b, :] - self.T[b, :, :]).T for b in range(self.dim)])
        return null_space(C, self.tol, scale=max(1.0, np.abs(self.T).max())).real

    def trace_gram(self, U) -> np.ndarray:
        """Gram matrix of ``tr(x y)`` (trace on ``R^N``) for the columns of ``U``."""
        mats = [self.lift(U[:, j]) for j in range(U.shape[1])]
        return np.array([[np.trace(a @ b) for b in mats] for a in mats])


def _central_split(S: SemisimpleQuotient, rng, tol: ToleranceConfig):
    Zc = S.center()
    dz = Zc.shape[1]
    for _ in range(MAX_RETRIES):
        z = Zc @ rng.standard_normal(dz)
        try:
            groups = _spectral_groups(S.left_op(z), tol)
        except (ToleranceError, np.linalg.LinAlgError):
            continue
        expected = sum(1 if abs(mu.imag) <= 1e-7 * max(1.0, abs(mu)) else 2 for mu, _ in groups)
        if expected != dz:
            continue
        idems = [P @ S.unit for _, P in groups]
        ok = all(np.linalg.norm(S.mul(e, e) - e) <= 1e-6 * max(1.0, np.linalg.norm(e)) for e in idems)
        if ok and np.linalg.norm(sum(idems) - S.unit) <= 1e-6 * max(1.0, np.linalg.norm(S.unit)):
            return idems
    raise ToleranceError("could not split the quotient into simple blocks")


def semisimple_blocks(E: EndAlgebraBasis, radical_basis=None, tol: ToleranceConfig = DEFAULT_TOL,
                      seed: int = 0):
    """Simple blocks of the quotient as ``(basis columns, central idempotent)`` pairs.

    Both are in quotient coordinates (see :class:`SemisimpleQuotient`).
    """
    if radical_basis is not None:
        E.radical_basis = radical_basis
    S = E.quotient
    rng = np.random.default_rng(seed)
    out = []
    for e in _central_split(S, rng, tol):
        B = _orth(S.left_op(e), tol)
        out.append((B, e))
    out.sort(key=lambda t: (t[0].shape[1], float(np.trace(S.lift(t[1])))))
    return out


def _corner(S: SemisimpleQuotient, f, tol):
    return _orth(S.left_op(f) @ S.right_op(f), tol)


def _is_division(S: SemisimpleQuotient, U) -> bool:
    G = S.trace_gram(U)
    w = np.linalg.eigvalsh((G + G.T) / 2)
    thr = 1e-8 * max(np.abs(w).max(), 1e-300)
    return int(np.sum(w > thr)) == 1


def _primitive_idempotent(S: SemisimpleQuotient, e, rng, tol):
    f = e
    for _ in range(64):
        U = _corner(S, f, tol)
        if _is_division(S, U):
            return f, U
        for _ in range(MAX_RETRIES):
            y = U @ rng.standard_normal(U.shape[1])
            L = U.T @ S.left_op(y) @ U
            try:
                groups = _spectral_groups(L, tol)
            except (ToleranceError, np.linalg.LinAlgError):
                continue
            if len(groups) > 1:
                _, P = groups[0]
                f = U @ (P @ (U.T @ f))
                break
        else:
            raise ToleranceError("random splitting of a non-division corner failed")
    raise ToleranceError("primitive idempotent search did not terminate")


def block_type(S: SemisimpleQuotient, block, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0):
    """``(type, multiplicity, indecomposable dim)`` of a simple block."""
    B, e = block
    rng = np.random.default_rng(seed)
    f, D = _primitive_idempotent(S, e, rng, tol)
    dD = D.shape[1]
    kind = {1: "R", 2: "C", 4: "H"}.get(dD)
    if kind is None:
        raise ToleranceError(f"division algebra of dimension {dD}")
    m2 = B.shape[1] / dD
    m = int(round(math.sqrt(m2)))
    if m * m * dD != B.shape[1]:
        raise ToleranceError("block dimension is not m^2 dim D")
    E = lift_idempotent(S.lift(e), tol)
    rank = float(np.trace(E))
    d = int(round(rank / m))
    if abs(rank - d * m) > 1e-6:
        raise ToleranceError("isotypic rank is not a multiple of the multiplicity")
    return kind, m, d


@dataclass
class Decomposition:
    descriptor: DecompositionDescriptor
    end: EndAlgebraBasis
    blocks: list


def decompose(rep: MonoidRepresentation, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0) -> Decomposition:
    E = end_algebra(rep, tol)
    E.radical_basis = radical(E, tol)
    blocks = semisimple_blocks(E, tol=tol, seed=seed)
    S = E.quotient
    found = {"R": [], "C": [], "H": []}
    typed = []
    for j, blk in enumerate(blocks):
        kind, m, d = block_type(S, blk, tol, seed=seed + 1 + j)
        found[kind].append((m, d))
        typed.append((kind, m, d, blk))
    desc = DecompositionDescriptor(tuple(found["R"]), tuple(found["C"]), tuple(found["H"]))
    if desc.total_dim != rep.dim:
        raise ToleranceError(f"descriptor accounts for {desc.total_dim} of {rep.dim} dimensions")
    return Decomposition(desc, E, typed)


def decomposition_descriptor(rep: MonoidRepresentation, tol: ToleranceConfig = DEFAULT_TOL,
                             seed: int = 0) -> DecompositionDescriptor:
    """End algebra, radical, simple blocks and block types in one call."""
    return decompose(rep, tol, seed).descriptor


def psi_image_check(E: EndAlgebraBasis, A, B, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Certify the two consequences of the quotient morphism on ``A`` and ``B``.

    Adding any radical basis element to ``A`` leaves its power traces
    unchanged, and the class of ``A B`` is the quotient product of the
    classes of ``A`` and ``B``.
    """
    for X, name in ((A, "A"), (B, "B")):
        if E.membership_residual(X) > tol.residual_tol:
            raise ValueError(f"{name} is not in the endomorphism algebra")
    S = E.quotient
    A = np.asarray(A, float)
    B = np.asarray(B, float)
    for X in E.radical_basis:
        if not power_trace_equal(A, A + X, tol):
            return False
    lhs = S.project(A @ B)
    rhs = S.mul(S.project(A), S.project(B))
    scale = max(1.0, np.linalg.norm(A) * np.linalg.norm(B))
    return bool(np.linalg.norm(lhs - rhs) <= tol.residual_tol * scale)


# ---------------------------------------------------------------------------
# Standard examples
# ---------------------------------------------------------------------------

def cyclic_permutation(n: int = 3) -> np.ndarray:
    return np.roll(np.eye(n), 1, axis=0)


def z3_rep() -> MonoidRepresentation:
    """``Z_3`` permuting the coordinates of ``R^3``."""
    return MonoidRepresentation(3, [cyclic_permutation(3)])


def z3_plus_trivial_rep() -> MonoidRepresentation:
    """``Z_3`` on ``R^4``: two trivial lines plus a rotation by 120 degrees."""
    c, s = np.cos(2 * np.pi / 3), np.sin(2 * np.pi / 3)
    return MonoidRepresentation(4, [sla.block_diag(np.eye(2), [[c, -s], [s, c]])])


def q8_rep() -> MonoidRepresentation:
    """Quaternion group acting on ``H = R^4`` by left multiplication."""
    from .linalg import quat_generators
    I, J, _ = quat_generators(1)
    return MonoidRepresentation(4, [I, J])


def nilpotent_monoid_rep() -> MonoidRepresentation:
    """Single generator ``Id + B_2(0)``; its commutant is ``span{Id, B_2(0)}``."""
    return MonoidRepresentation(2, [np.array([[1.0, 1.0], [0.0, 1.0]])])
