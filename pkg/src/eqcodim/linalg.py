"""Dense matrix kernels shared by every other module.

Ranks, clustered spectra, Sylvester operators, Jordan partitions and the
quaternionic structure predicates all live here.  Everything is a pure
function of its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "SpectrumMultiset",
    "ToleranceError",
    "sylvester_operator",
    "numerical_rank",
    "null_space",
    "cluster_eigenvalues",
    "spectrum",
    "power_trace_equal",
    "jordan_structure",
    "jordan_structure_at_cluster",
    "invariant_subspace",
    "canonical_basis",
    "S_matrix",
    "is_quat_structured",
    "embed_C",
    "embed_H",
    "quat_generators",
    "quat_jordan_pairing_check",
    "to_real_vector",
]


class ToleranceError(ArithmeticError):
    """A numerical decision could not be made at the configured tolerance."""


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds.

    Parameters
    ----------
    rank_tol
        Relative singular value threshold used for ranks.
    cluster_tol
        Base eigenvalue clustering radius, relative to ``||M||``.
    residual_tol
        Bound on relative residuals when certifying identities.
    defect_tol
        Assumed relative perturbation level of the input.  A Jordan block of
        size ``s`` smears its eigenvalue over a disc of radius about
        ``defect_tol ** (1/s)``, so clusters of ``s`` eigenvalues are allowed
        to be that wide.
    """

    rank_tol: float = 1e-9
    cluster_tol: float = 1e-6
    residual_tol: float = 1e-8
    defect_tol: float = 1e-10

    def __post_init__(self):
        for name in ("rank_tol", "cluster_tol", "residual_tol", "defect_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not self.rank_tol < 1:
            raise ValueError("rank_tol must be < 1")

    def cluster_radius(self, size: int, scale: float) -> float:
        """Admissible radius of a cluster holding ``size`` eigenvalues."""
        return scale * max(self.cluster_tol, self.defect_tol ** (1.0 / max(size, 1)))


DEFAULT_TOL = ToleranceConfig()


def _square(M, name="matrix"):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    return M


def to_real_vector(M) -> np.ndarray:
    """Flatten a real or complex array into a real vector (re parts, then im)."""
    M = np.asarray(M)
    if np.iscomplexobj(M):
        return np.concatenate([M.real.ravel(), M.imag.ravel()])
    return M.ravel().astype(float)


# ---------------------------------------------------------------------------
# Sylvester operators and ranks
# ---------------------------------------------------------------------------

def sylvester_operator(A, B) -> np.ndarray:
    """Matrix of ``X -> X A - B X`` acting on ``m x n`` matrices.

    ``X`` is vectorised by stacking columns, so the operator equals
    ``kron(A.T, I_m) - kron(I_n, B)``.  Its eigenvalues are ``lambda_i - mu_j``
    for ``lambda_i`` in spec(A) and ``mu_j`` in spec(B).
    """
    A = _square(A, "A")
    B = _square(B, "B")
    n, m = A.shape[0], B.shape[0]
    return np.kron(A.T, np.eye(m)) - np.kron(np.eye(n), B)


def numerical_rank(M, tol: ToleranceConfig = DEFAULT_TOL, scale: Optional[float] = None) -> int:
    """Number of singular values above ``rank_tol * scale``.

    ``scale`` defaults to the largest singular value, making the threshold
    relative.  The zero matrix has rank 0.
    """
    M = np.asarray(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    ref = s[0] if scale is None else scale
    if ref == 0:
        return 0
    return int(np.sum(s > tol.rank_tol * ref))


def null_space(M, tol: ToleranceConfig = DEFAULT_TOL, scale: Optional[float] = None) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of ``M``.

    Singular values below ``rank_tol * scale`` count as zero; ``scale``
    defaults to the largest singular value.  Pass it explicitly when ``M``
    may be numerically zero.
    """
    M = np.asarray(M)
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=M.dtype)
    u, s, vh = np.linalg.svd(M)
    ref = (s[0] if s.size else 0.0) if scale is None else scale
    r = 0 if ref == 0 else int(np.sum(s > tol.rank_tol * ref))
    return vh[r:].conj().T


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumMultiset:
    """Clustered eigenvalues with algebraic multiplicities."""

    eigenvalues: Tuple[Tuple[complex, int], ...]

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.eigenvalues], dtype=complex)

    @property
    def multiplicities(self) -> List[int]:
        return [k for _, k in self.eigenvalues]

    @property
    def dimension(self) -> int:
        return sum(self.multiplicities)

    def matches(self, other: "SpectrumMultiset", atol: float) -> bool:
        """Greedy matching of values (within ``atol``) and multiplicities."""
        if sorted(self.multiplicities) != sorted(other.multiplicities):
            return False
        remaining = list(other.eigenvalues)
        for v, k in self.eigenvalues:
            hit = None
            for idx, (w, l) in enumerate(remaining):
                if l == k and abs(v - w) <= atol:
                    hit = idx
                    break
            if hit is None:
                return False
            remaining.pop(hit)
        return True


def _mst_edges(z: np.ndarray):
    """Prim's algorithm on the complete graph of points ``z``; returns (i, j, d)."""
    n = len(z)
    if n < 2:
        return []
    dist = np.abs(z[:, None] - z[None, :])
    in_tree = np.zeros(n, bool)
    in_tree[0] = True
    best = dist[0].copy()
    parent = np.zeros(n, int)
    edges = []
    for _ in range(n - 1):
        cand = np.where(in_tree, np.inf, best)
        j = int(np.argmin(cand))
        edges.append((int(parent[j]), j, float(best[j])))
        in_tree[j] = True
        closer = dist[j] < best
        best = np.where(closer, dist[j], best)
        parent = np.where(closer, j, parent)
    return edges


def _components(nodes, edges):
    adj = {v: [] for v in nodes}
    for i, j, _ in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen, comps = set(), []
    for v in nodes:
        if v in seen:
            continue
        stack, comp = [v], []
        seen.add(v)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def cluster_eigenvalues(eigs, scale: float, tol: ToleranceConfig = DEFAULT_TOL,
                        gap_ratio: float = 4.0, verify=None) -> List[np.ndarray]:
    """Group computed eigenvalues that represent one exact eigenvalue.

    Single linkage on the minimum spanning tree, split top-down: the longest
    edge of a group is cut unless it is shorter than the group's admissible
    radius *and* not much longer than the edges inside the two halves (a
    perturbed Jordan block spreads its eigenvalues evenly on a small circle,
    two distinct eigenvalues leave one long edge).  Groups wider than the
    base radius are kept only if ``verify(indices)`` (when given) confirms
    they behave as a single defective eigenvalue.
    """
    z = np.asarray(eigs, dtype=complex)
    n = len(z)
    if n == 0:
        return []
    scale = float(scale) if scale > 0 else 1.0
    base = tol.cluster_tol * scale
    all_edges = _mst_edges(z)
    out: List[np.ndarray] = []

    def split(nodes, edges):
        if len(nodes) == 1 or not edges:
            out.append(np.array(nodes))
            return
        k = max(range(len(edges)), key=lambda t: edges[t][2])
        e_max = edges[k][2]
        rest = edges[:k] + edges[k + 1:]
        if e_max <= base:
            out.append(np.array(nodes))
            return
        inner = max([e[2] for e in rest], default=0.0)
        if e_max <= 2 * tol.cluster_radius(len(nodes), scale) and e_max <= gap_ratio * max(inner, base) \
                and (verify is None or verify(np.array(nodes))):
            out.append(np.array(nodes))
            return
        for comp in _components(nodes, rest):
            cs = set(comp)
            split(comp, [e for e in rest if e[0] in cs])

    split(list(range(n)), all_edges)
    out.sort(key=lambda idx: (np.mean(z[idx]).real, np.mean(z[idx]).imag))
    return out


def _schur(M):
    M = np.asarray(M)
    T, Q = sla.schur(M.astype(complex), output="complex")
    return T, Q


def spectrum(M, tol: ToleranceConfig = DEFAULT_TOL) -> SpectrumMultiset:
    """Eigenvalues of ``M`` clustered into a multiset.

    For real input the result is closed under complex conjugation.
    """
    M = _square(M)
    n = M.shape[0]
    if n == 0:
        return SpectrumMultiset(())
    try:
        T, Q, eigs, clusters, scale = _clustered_schur(M, tol)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ToleranceError("eigensolver did not converge") from exc
    real_input = not np.iscomplexobj(M)
    items = []
    for idx in clusters:
        mu = complex(np.mean(eigs[idx]))
        if real_input and abs(mu.imag) <= tol.cluster_radius(len(idx), scale if scale > 0 else 1.0):
            mu = complex(mu.real, 0.0)
        items.append((mu, len(idx)))
    return SpectrumMultiset(tuple(items))


def power_trace_equal(A, B, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff ``tr(A^k) == tr(B^k)`` for ``k = 1..n`` (relative tolerance).

    Equal power traces force equal eigenvalues counted with algebraic
    multiplicity, and the test is insensitive to Jordan structure.
    """
    A = _square(A, "A")
    B = _square(B, "B")
    if A.shape != B.shape:
        raise ValueError("dimension mismatch")
    n = A.shape[0]
    scale = max(np.linalg.norm(A, 2), np.linalg.norm(B, 2), np.finfo(float).tiny)
    Ak = np.eye(n)
    Bk = np.eye(n)
    for k in range(1, n + 1):
        Ak = Ak @ A
        Bk = Bk @ B
        if abs(np.trace(Ak) - np.trace(Bk)) > tol.residual_tol * n * scale ** k:
            return False
    return True


# ---------------------------------------------------------------------------
# Invariant subspaces and Jordan structure
# ---------------------------------------------------------------------------

def _reordered_schur(T, Q, select):
    sel = np.asarray(select, dtype=np.int32)
    if sel.all() or not sel.any():
        return T, Q
    ts, qs, w, m, s, sep, info = lapack.ztrsen(sel, T, Q, job="N")
    if info != 0:
        raise ToleranceError(f"Schur reordering failed (info={info})")
    return ts, qs


def _clustered_schur(M, tol: ToleranceConfig):
    T, Q = _schur(M)
    eigs = np.diag(T).copy()
    scale = np.linalg.norm(M, 2) if M.size else 0.0

    def one_eigenvalue(idx):
        try:
            jordan_structure_at_cluster(T, Q, eigs, idx, scale, tol)
        except ToleranceError:
            return False
        return True

    clusters = cluster_eigenvalues(eigs, scale, tol, verify=one_eigenvalue)
    return T, Q, eigs, clusters, scale


def _deflation_staircase(A, threshold: float) -> List[int]:
    """Nullities ``d_k = dim ker A^k - dim ker A^(k-1)`` by repeated deflation.

    If ``A V0 = 0`` for the kernel basis ``V0`` and ``V1`` spans its
    orthogonal complement, ``ker A^k = ker A + V1 ker(V1* A V1)^(k-1)``; one
    well-scaled rank decision per step replaces ranks of matrix powers.
    """
    d = []
    cur = np.asarray(A, dtype=complex)
    while cur.shape[0] > 0:
        u, s, vh = np.linalg.svd(cur)
        r = int(np.sum(s > threshold))
        nul = cur.shape[0] - r
        if nul == 0:
            break
        d.append(nul)
        V1 = vh[:r].conj().T
        cur = V1.conj().T @ cur @ V1
    return d


def _partition_from_nullities(d: Sequence[int], size: int) -> Tuple[int, ...]:
    # d[k-1] = number of Jordan blocks of size >= k
    if sum(d) != size:
        raise ToleranceError(f"staircase nullities {list(d)} do not add up to cluster size {size}")
    counts = []
    for k in range(len(d)):
        nxt = d[k + 1] if k + 1 < len(d) else 0
        q = d[k] - nxt
        if q < -1:
            raise ToleranceError(f"negative Jordan block count {q} at size {k + 1}")
        counts.append(max(q, 0))
    parts = []
    for k in range(len(counts), 0, -1):
        parts.extend([k] * counts[k - 1])
    if sum(parts) != size:
        raise ToleranceError("Jordan partition does not match the algebraic multiplicity")
    return tuple(parts)


def jordan_structure_at_cluster(T, Q, eigs, idx, scale, tol: ToleranceConfig):
    """Partition of the Jordan blocks for one eigenvalue cluster of a Schur form."""
    select = np.zeros(len(eigs), dtype=np.int32)
    select[idx] = 1
    Ts, _ = _reordered_schur(T, Q, select)
    s = len(idx)
    mu = complex(np.mean(eigs[idx]))
    T11 = Ts[:s, :s] - mu * np.eye(s)
    threshold = tol.rank_tol * (scale if scale > 0 else 1.0)
    d = _deflation_staircase(T11, threshold)
    return _partition_from_nullities(d, s), mu


def jordan_structure(M, lam: complex, tol: ToleranceConfig = DEFAULT_TOL) -> Tuple[int, ...]:
    """Sizes of the Jordan blocks of ``M`` for the eigenvalue ``lam``.

    The block counts follow the rank staircase ``Q_m = r_{m-1} - 2 r_m +
    r_{m+1}`` with ``r_k = rank (M - lam)^k``.  The ranks are evaluated on the
    Schur block of the eigenvalue cluster containing ``lam``, which carries
    the same staircase as the full matrix.
    """
    M = _square(M)
    T, Q, eigs, clusters, scale = _clustered_schur(M, tol)
    sc = scale if scale > 0 else 1.0
    best = None
    for idx in clusters:
        mu = np.mean(eigs[idx])
        rad = max(tol.cluster_radius(len(idx), sc), 2 * np.max(np.abs(eigs[idx] - mu)))
        if abs(mu - lam) <= rad and (best is None or abs(mu - lam) < best[0]):
            best = (abs(mu - lam), idx)
    if best is None:
        raise ValueError(f"{lam} is not an eigenvalue within tolerance")
    part, _ = jordan_structure_at_cluster(T, Q, eigs, best[1], scale, tol)
    return part


def canonical_basis(V: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of ``range(V)``.

    Coordinate subspaces come out as the matching identity columns.
    """
    V = np.asarray(V)
    n, k = V.shape
    if k == 0:
        return np.zeros((n, 0), dtype=V.dtype)
    Qv, _ = np.linalg.qr(V)
    P = Qv @ Qv.conj().T
    _, _, piv = sla.qr(P, pivoting=True)
    cols = np.sort(piv[:k])
    B, R = np.linalg.qr(P[:, cols])
    signs = np.sign(np.diag(R).real)
    signs[signs == 0] = 1
    B = B * signs
    B[np.abs(B) < 1e-15] = 0.0
    return B


def invariant_subspace(M, select_cluster, tol: ToleranceConfig = DEFAULT_TOL):
    """Orthonormal basis of the invariant subspace of the selected clusters.

    ``select_cluster(mu, size, radius)`` decides per cluster.  Returns
    ``(basis, selected_eigs, other_eigs)``; the basis is real for real input
    (the selection must then be closed under conjugation).
    """
    M = _square(M)
    T, Q, eigs, clusters, scale = _clustered_schur(M, tol)
    sc = scale if scale > 0 else 1.0
    select = np.zeros(len(eigs), dtype=np.int32)
    for idx in clusters:
        mu = complex(np.mean(eigs[idx]))
        if select_cluster(mu, len(idx), tol.cluster_radius(len(idx), sc)):
            select[idx] = 1
    k = int(select.sum())
    _, Qs = _reordered_schur(T, Q, select)
    V = Qs[:, :k]
    if not np.iscomplexobj(M) and k > 0:
        R = np.hstack([V.real, V.imag])
        u, s, _ = np.linalg.svd(R, full_matrices=False)
        if np.sum(s > 1e-8 * s[0]) != k:
            raise ToleranceError("selected spectral set is not closed under conjugation")
        V = u[:, :k]
    return canonical_basis(V), eigs[select == 1], eigs[select == 0]


# ---------------------------------------------------------------------------
# Quaternionic structure
# ---------------------------------------------------------------------------

def S_matrix(n: int) -> np.ndarray:
    """``[[0, I_n], [-I_n, 0]]``."""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def is_quat_structured(Z, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Does ``Z`` satisfy ``S Z = conj(Z) S``, i.e. ``Z = [[X, Y], [-conj Y, conj X]]``?"""
    Z = _square(Z)
    if Z.shape[0] % 2:
        raise ValueError("quaternionic structure needs even dimension")
    S = S_matrix(Z.shape[0] // 2)
    res = np.linalg.norm(S @ Z - np.conj(Z) @ S)
    return bool(res <= tol.residual_tol * max(np.linalg.norm(Z), np.finfo(float).tiny))


def quat_generators(n: int = 1):
    """Real ``4n x 4n`` matrices representing the quaternion units i, j, k.

    For ``n = 1`` these are the standard choices; in general each entry is
    replaced by the corresponding multiple of ``I_n``.
    """
    I_ = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], float)
    J_ = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]], float)
    K_ = np.array([[0, 0, 0, 1], [0, 0, -1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], float)
    return tuple(np.kron(G, np.eye(n)) for G in (I_, J_, K_))


def _check_block(X, expected, what):
    if np.linalg.norm(X - expected) > 1e-12 * max(1.0, np.linalg.norm(X)):
        raise ValueError(f"input does not have the {what} block shape")


def embed_C(X) -> np.ndarray:
    """``[[A, B], [-B, A]] -> A + iB``."""
    X = _square(X)
    if X.shape[0] % 2:
        raise ValueError("complex block shape needs even dimension")
    n = X.shape[0] // 2
    A, B = X[:n, :n], X[:n, n:]
    _check_block(X, np.block([[A, B], [-B, A]]), "complex")
    return A + 1j * B


def embed_H(X) -> np.ndarray:
    """Real ``4n x 4n`` quaternionic block matrix -> ``[[A+Bi, C+Di], [-C+Di, A-Bi]]``."""
    X = _square(X)
    if X.shape[0] % 4:
        raise ValueError("quaternionic block shape needs dimension divisible by 4")
    n = X.shape[0] // 4
    blk = lambda i, j: X[i * n:(i + 1) * n, j * n:(j + 1) * n]
    A, B, C, D = blk(0, 0), blk(0, 1), blk(0, 2), blk(0, 3)
    expected = np.block([[A, B, C, D], [-B, A, -D, C], [-C, D, A, -B], [-D, -C, B, A]])
    _check_block(X, expected, "quaternionic")
    return np.block([[A + 1j * B, C + 1j * D], [-C + 1j * D, A - 1j * B]])


def quat_jordan_pairing_check(Z, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Jordan structure of a quaternionic-structured matrix pairs up.

    Non-real eigenvalues carry the same partition as their conjugates, and
    every Jordan block size of a real eigenvalue occurs an even number of
    times.
    """
    Z = _square(Z)
    if not is_quat_structured(Z, tol):
        raise ValueError("matrix is not quaternionic structured")
    T, Q, eigs, clusters, scale = _clustered_schur(Z, tol)
    sc = scale if scale > 0 else 1.0
    parts = []
    for idx in clusters:
        p, mu = jordan_structure_at_cluster(T, Q, eigs, idx, scale, tol)
        parts.append((mu, len(idx), p))
    for mu, size, p in parts:
        rad = tol.cluster_radius(size, sc)
        if abs(mu.imag) <= rad:
            counts = {}
            for s in p:
                counts[s] = counts.get(s, 0) + 1
            if any(c % 2 for c in counts.values()):
                return False
        else:
            partner = [q for nu, sz, q in parts
                       if abs(nu - np.conj(mu)) <= max(rad, tol.cluster_radius(sz, sc))]
            if len(partner) != 1 or partner[0] != p:
                return False
    return True
