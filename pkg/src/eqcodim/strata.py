"""Orbit strata of the three reduced matrix algebras.

The ambient algebras are ``mat(R, n)`` (field ``"R"``), ``mat(C, n)``
(``"C"``) and the complex ``2n x 2n`` matrices ``[[X, Y], [-conj Y, conj X]]``
(``"H"``).  Two kinds of strata are handled:

* ``nilpotent``: conjugacy orbits of nilpotent elements, labelled by a
  partition ``p`` of ``n``.
* ``center``: elements with purely imaginary spectrum, labelled by the
  Jordan data of each imaginary eigenvalue.

Block data for the imaginary eigenvalues is a :class:`XiLabel`: an outer
partition whose parts are the algebraic multiplicities, and an inner
partition per part giving the Jordan block sizes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    ToleranceError,
    S_matrix,
    _clustered_schur,
    is_quat_structured,
    jordan_structure_at_cluster,
    numerical_rank,
    to_real_vector,
)

FIELDS = ("R", "C", "H")
KINDS = ("nilpotent", "center")

Partition = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Partitions and labels
# ---------------------------------------------------------------------------

def check_partition(p: Sequence[int], total: Optional[int] = None) -> Partition:
    p = tuple(int(s) for s in p)
    if any(s < 1 for s in p) or list(p) != sorted(p, reverse=True):
        raise ValueError(f"{p} is not a partition (positive, weakly decreasing)")
    if total is not None and sum(p) != total:
        raise ValueError(f"{p} is not a partition of {total}")
    return p


@lru_cache(maxsize=None)
def partitions(n: int, largest: Optional[int] = None) -> Tuple[Partition, ...]:
    """All partitions of ``n`` in reverse lexicographic order; ``()`` for n=0."""
    if n == 0:
        return ((),)
    largest = n if largest is None else min(largest, n)
    out = []
    for first in range(largest, 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


@dataclass(frozen=True)
class XiLabel:
    """Block data ``(p; p_1, ..., p_k)``: part sizes and a partition of each."""

    outer: Partition
    inner: Tuple[Partition, ...]

    def __post_init__(self):
        check_partition(self.outer)
        if len(self.inner) != len(self.outer):
            raise ValueError("need one inner partition per outer part")
        for s, q in zip(self.outer, self.inner):
            check_partition(q, s)

    @classmethod
    def from_blocks(cls, blocks) -> "XiLabel":
        """Canonical label from ``(size, inner)`` pairs in any order."""
        blocks = sorted(((int(s), tuple(q)) for s, q in blocks), reverse=True)
        return cls(tuple(s for s, _ in blocks), tuple(q for _, q in blocks))

    @property
    def size(self) -> int:
        return sum(self.outer)

    @property
    def blocks(self):
        return list(zip(self.outer, self.inner))

    def is_canonical(self) -> bool:
        return self == XiLabel.from_blocks(self.blocks)

    def to_dict(self):
        return {"outer": list(self.outer), "inner": [list(q) for q in self.inner]}


@lru_cache(maxsize=None)
def xi_labels(m: int) -> Tuple[XiLabel, ...]:
    """Canonical labels of size ``m``; block reorderings are identified."""
    if m == 0:
        return (XiLabel((), ()),)
    seen = []
    for outer in partitions(m):
        for inner in itertools.product(*[partitions(s) for s in outer]):
            lab = XiLabel.from_blocks(zip(outer, inner))
            if lab not in seen:
                seen.append(lab)
    return tuple(seen)


@dataclass(frozen=True)
class StratumLabel:
    """Field, kind, ambient size and the partition data of a stratum.

    Nilpotent labels carry ``p``.  Center labels carry ``xi`` and, for
    ``R`` and ``H``, the number ``m`` of imaginary slots and the partition
    ``q`` of the zero eigenvalue.  Over ``C`` the zero eigenvalue is an
    ordinary block of ``xi`` and ``m``/``q`` are unused.
    """

    field: str
    kind: str
    n: int
    p: Optional[Partition] = None
    xi: Optional[XiLabel] = None
    m: Optional[int] = None
    q: Optional[Partition] = None

    def __post_init__(self):
        if self.field not in FIELDS:
            raise ValueError(f"unknown field {self.field!r}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == "nilpotent":
            check_partition(self.p, self.n)
            return
        if self.xi is None or not self.xi.is_canonical():
            raise ValueError("center label needs a canonical xi")
        if self.field == "C":
            if self.xi.size != self.n or self.m is not None or self.q is not None:
                raise ValueError("complex center label needs xi of size n and no m, q")
            return
        if self.m is None or self.q is None or self.xi.size != self.m:
            raise ValueError("real/quaternionic center label needs m, q and xi of size m")
        rest = self.n - (2 * self.m if self.field == "R" else self.m)
        if rest < 0:
            raise ValueError("too many imaginary slots for n")
        check_partition(self.q, rest)

    def to_dict(self):
        d = {"field": self.field, "kind": self.kind, "n": self.n}
        if self.kind == "nilpotent":
            d["partition"] = list(self.p)
        else:
            d["xi"] = self.xi.to_dict()
            if self.field != "C":
                d["m"] = self.m
                d["q"] = list(self.q)
        return d

    @classmethod
    def from_dict(cls, d) -> "StratumLabel":
        if d["kind"] == "nilpotent":
            return cls(d["field"], "nilpotent", int(d["n"]), p=tuple(d["partition"]))
        xi = XiLabel.from_blocks(zip(d["xi"]["outer"], d["xi"]["inner"]))
        if d["field"] == "C":
            return cls("C", "center", int(d["n"]), xi=xi)
        return cls(d["field"], "center", int(d["n"]), xi=xi, m=int(d["m"]), q=tuple(d["q"]))

    def __str__(self):
        if self.kind == "nilpotent":
            return f"{self.field}{self.n}:nil{list(self.p)}"
        xi = ";".join(f"{s}{list(q)}" for s, q in self.xi.blocks)
        if self.field == "C":
            return f"C{self.n}:cen({xi})"
        return f"{self.field}{self.n}:cen(m={self.m};{xi};q={list(self.q)})"


def enumerate_strata(field: str, n: int, kind: str) -> List[StratumLabel]:
    """Complete duplicate-free list of canonical labels."""
    if field not in FIELDS or kind not in KINDS:
        raise ValueError("bad field or kind")
    if kind == "nilpotent":
        return [StratumLabel(field, kind, n, p=p) for p in partitions(n)]
    if field == "C":
        return [StratumLabel("C", kind, n, xi=xi) for xi in xi_labels(n)]
    out = []
    top_m = n // 2 if field == "R" else n
    for m in range(top_m, -1, -1):
        rest = n - (2 * m if field == "R" else m)
        for xi in xi_labels(m):
            for q in partitions(rest):
                out.append(StratumLabel(field, kind, n, xi=xi, m=m, q=q))
    return out


def top_label(field: str, n: int, kind: str) -> StratumLabel:
    """The unique stratum of largest dimension."""
    if kind == "nilpotent":
        return StratumLabel(field, kind, n, p=(n,))
    if field == "C":
        return StratumLabel("C", kind, n, xi=XiLabel((1,) * n, ((1,),) * n))
    m = n // 2 if field == "R" else n
    q = (1,) if field == "R" and n % 2 else ()
    return StratumLabel(field, kind, n, xi=XiLabel((1,) * m, ((1,),) * m), m=m, q=q)


def ambient_real_dim(field: str, n: int) -> int:
    return {"R": 1, "C": 2, "H": 4}[field] * n * n


def closed_form_dim(label: StratumLabel) -> Optional[int]:
    """Known real dimension of the top strata; ``None`` for the others."""
    if label != top_label(label.field, label.n, label.kind):
        return None
    n = label.n
    if label.kind == "nilpotent":
        return {"R": n * n - n, "C": 2 * (n * n - n), "H": 4 * n * n - 4 * n}[label.field]
    return {"R": n * n - (n + 1) // 2, "C": 2 * n * n - n, "H": 4 * n * n - n}[label.field]


def closed_form_codim(field: str, n: int, kind: str) -> int:
    if kind == "nilpotent":
        return {"R": n, "C": 2 * n, "H": 4 * n}[field]
    return {"R": (n + 1) // 2, "C": n, "H": n}[field]


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def jordan_block(n: int, lam: complex = 0.0) -> np.ndarray:
    """``lam`` on the diagonal, ones on the superdiagonal."""
    if n < 1:
        raise ValueError("Jordan block needs n >= 1")
    dtype = complex if np.iscomplexobj(lam) or isinstance(lam, complex) else float
    return lam * np.eye(n, dtype=dtype) + np.eye(n, k=1, dtype=dtype)


def block_diag_partition(p: Sequence[int], lam: complex = 0.0) -> np.ndarray:
    """Block diagonal of Jordan blocks of sizes ``p`` at ``lam``."""
    if len(p) == 0:
        raise ValueError("empty partition")
    return sla.block_diag(*[jordan_block(s, lam) for s in check_partition(p)])


def _check_distinct(x, positive: bool):
    x = np.asarray(x, dtype=float)
    if len(set(np.round(x, 14))) != len(x):
        raise ValueError("parameters must be pairwise distinct")
    if positive and np.any(x <= 0):
        raise ValueError("parameters must be strictly positive")
    return x


def build_B_xi(xi: XiLabel, x) -> np.ndarray:
    """Block diagonal with ``B_{s_j, p_j}(x_j i)``; ``x = 0`` is allowed."""
    x = np.asarray(x, dtype=float).ravel()
    if len(x) != len(xi.outer):
        raise ValueError("need one parameter per block")
    if xi.size == 0:
        return np.zeros((0, 0), complex)
    if np.any(x != 0):
        _check_distinct(x, positive=False)
    return sla.block_diag(*[block_diag_partition(q, 1j * xj).astype(complex)
                            for q, xj in zip(xi.inner, x)])


def build_I_p(p: Sequence[int], z) -> np.ndarray:
    """Block scalar matrix ``diag(z_1 Id_{s_1}, ..., z_k Id_{s_k})``."""
    z = np.atleast_1d(np.asarray(z))
    if len(z) != len(p):
        raise ValueError("need one scalar per part")
    return np.diag(np.repeat(z, list(p)).astype(complex))


def Z_matrix(n: int, m: int) -> np.ndarray:
    """``[[I_m, i I_m, 0], [i I_m, I_m, 0], [0, 0, I_{n-2m}]]``."""
    if not 0 <= 2 * m <= n:
        raise ValueError("need 0 <= 2m <= n")
    I = np.eye(m)
    Z = np.eye(n, dtype=complex)
    Z[:m, m:2 * m] = 1j * I
    Z[m:2 * m, :m] = 1j * I
    return Z


def _realify(X, tol: ToleranceConfig, what: str) -> np.ndarray:
    if np.linalg.norm(X.imag) > tol.residual_tol * max(1.0, np.linalg.norm(X)):
        raise ToleranceError(f"{what} is not real within tolerance")
    return X.real.copy()


def build_real_center_rep(n: int, m: int, xi: XiLabel, q: Sequence[int], x,
                          tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Real representative ``Z D Z^-1`` with ``D = diag(B_xi(x), B_xi(-x), B_q(0))``."""
    if not 2 * m <= n:
        raise ValueError("need 2m <= n")
    if xi.size != m:
        raise ValueError("xi must have size m")
    check_partition(q, n - 2 * m)
    blocks = []
    if m:
        x = _check_distinct(x, positive=True)
        blocks += [build_B_xi(xi, x), build_B_xi(xi, -x)]
    if n - 2 * m:
        blocks.append(block_diag_partition(q).astype(complex))
    D = sla.block_diag(*blocks)
    Z = Z_matrix(n, m)
    return _realify(Z @ D @ np.linalg.inv(Z), tol, "real center representative")


def build_quat_center_rep(n: int, m: int, xi: XiLabel, q: Sequence[int], x) -> np.ndarray:
    """``diag(H, conj H)`` with ``H = diag(B_xi(x), B_q(0))``."""
    if not 0 <= m <= n or xi.size != m:
        raise ValueError("need 0 <= m <= n and xi of size m")
    check_partition(q, n - m)
    blocks = []
    if m:
        blocks.append(build_B_xi(xi, _check_distinct(x, positive=True)))
    if n - m:
        blocks.append(block_diag_partition(q).astype(complex))
    H = sla.block_diag(*blocks)
    return sla.block_diag(H, H.conj())


def quat_from_blocks(X, Y) -> np.ndarray:
    """``[[X, Y], [-conj Y, conj X]]``."""
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    return np.block([[X, Y], [-Y.conj(), X.conj()]])


# ---------------------------------------------------------------------------
# Samples and tangent dimensions
# ---------------------------------------------------------------------------

@dataclass
class StratumSample:
    label: StratumLabel
    parameters: np.ndarray
    matrix: np.ndarray = dc_field(repr=False)


def _n_params(label: StratumLabel) -> int:
    return 0 if label.kind == "nilpotent" else len(label.xi.outer)


def sample_parameters(label: StratumLabel, rng=None) -> np.ndarray:
    """``x_j = j/k + 0.01 U(0,1)``: positive and well separated."""
    rng = np.random.default_rng(rng)
    k = _n_params(label)
    if k == 0:
        return np.zeros(0)
    return np.arange(1, k + 1) / k + 0.01 * rng.uniform(size=k)


def representative(label: StratumLabel, x=None, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    n = label.n
    if label.kind == "nilpotent":
        B = block_diag_partition(label.p)
        if label.field == "R":
            return B.astype(float)
        if label.field == "C":
            return B.astype(complex)
        return sla.block_diag(B, B).astype(complex)
    x = sample_parameters(label, 0) if x is None else np.asarray(x, float)
    if label.field == "C":
        return build_B_xi(label.xi, x)
    if label.field == "R":
        return build_real_center_rep(n, label.m, label.xi, label.q, x, tol)
    return build_quat_center_rep(n, label.m, label.xi, label.q, x)


def sample_stratum(label: StratumLabel, rng=None, tol: ToleranceConfig = DEFAULT_TOL) -> StratumSample:
    x = sample_parameters(label, rng)
    return StratumSample(label, x, representative(label, x, tol))


def ambient_basis(field: str, n: int) -> List[np.ndarray]:
    """Real basis of the ambient algebra as matrices."""
    E = []
    for a in range(n):
        for b in range(n):
            e = np.zeros((n, n))
            e[a, b] = 1.0
            E.append(e)
    if field == "R":
        return E
    if field == "C":
        return [e.astype(complex) for e in E] + [1j * e for e in E]
    Zn = np.zeros((n, n))
    out = []
    for e in E:
        for unit in (1.0, 1j):
            out.append(quat_from_blocks(unit * e, Zn))
            out.append(quat_from_blocks(Zn, unit * e))
    return out


def parameter_directions(label: StratumLabel) -> List[np.ndarray]:
    """Directions moving the imaginary eigenvalues of a center representative."""
    if label.kind == "nilpotent" or not label.xi.outer:
        return []
    n, xi = label.n, label.xi
    k = len(xi.outer)
    out = []
    for j in range(k):
        Ij = build_I_p(xi.outer, 1j * np.eye(k)[j])
        if label.field == "C":
            out.append(Ij)
        elif label.field == "R":
            m = label.m
            Ibar = sla.block_diag(Ij, Ij.conj(), np.zeros((n - 2 * m, n - 2 * m)))
            Z = Z_matrix(n, m)
            out.append((Z @ Ibar @ np.linalg.inv(Z)).real)
        else:
            m = label.m
            Ip = sla.block_diag(Ij, np.zeros((n - m, n - m)))
            out.append(sla.block_diag(Ip, Ip.conj()))
    return out


def tangent_generators(label: StratumLabel, X0) -> np.ndarray:
    """Rows are real vectors spanning the tangent space of the stratum at ``X0``."""
    rows = [to_real_vector(V @ X0 - X0 @ V) for V in ambient_basis(label.field, label.n)]
    rows += [to_real_vector(D) for D in parameter_directions(label)]
    return np.array(rows)


def stratum_dimension(label: StratumLabel, sample: Optional[StratumSample] = None,
                      tol: ToleranceConfig = DEFAULT_TOL) -> Tuple[int, Optional[int]]:
    """Measured (tangent rank) and, for top strata, closed-form real dimension."""
    if sample is None:
        sample = sample_stratum(label, 0, tol)
    elif sample.label != label:
        raise ValueError("sample does not belong to the label")
    T = tangent_generators(label, sample.matrix)
    scale = max(1.0, np.linalg.norm(sample.matrix, 2))
    return numerical_rank(T, tol, scale=scale), closed_form_dim(label)


def stratum_codim(label: StratumLabel, ambient: Optional[int] = None,
                  sample: Optional[StratumSample] = None,
                  tol: ToleranceConfig = DEFAULT_TOL) -> int:
    ambient = ambient_real_dim(label.field, label.n) if ambient is None else ambient
    return ambient - stratum_dimension(label, sample, tol)[0]


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

def _field_size(M, field: str) -> int:
    N = M.shape[0]
    if field == "H":
        if N % 2:
            raise ValueError("quaternionic input needs even dimension")
        return N // 2
    return N


def _halve(p: Partition) -> Partition:
    counts: Dict[int, int] = {}
    for s in p:
        counts[s] = counts.get(s, 0) + 1
    if any(c % 2 for c in counts.values()):
        raise ToleranceError(f"zero eigenvalue partition {p} is not paired")
    return tuple(sorted((s for s, c in counts.items() for _ in range(c // 2)), reverse=True))


def classify(M, field: str, tol: ToleranceConfig = DEFAULT_TOL,
             kind: Optional[str] = None) -> Optional[StratumLabel]:
    """Stratum label of ``M``, or ``None`` if the spectrum fits neither kind.

    All-zero spectra give a nilpotent label unless ``kind="center"`` is
    requested.  Eigenvalues whose real part lies between one and ten
    clustering radii from the axis make the call ambiguous and raise
    :class:`ToleranceError`.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if field not in FIELDS:
        raise ValueError(f"unknown field {field!r}")
    if kind is not None and kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if field == "R" and np.iscomplexobj(M):
        if np.linalg.norm(M.imag) > tol.residual_tol * max(1.0, np.linalg.norm(M)):
            raise ValueError("real field needs a real matrix")
        M = M.real
    if field == "H" and not is_quat_structured(M.astype(complex), tol):
        raise ValueError("matrix is not quaternionic structured")
    n = _field_size(M, field)

    T, Q, eigs, clusters, scale = _clustered_schur(M, tol)
    sc = scale if scale > 0 else 1.0
    info = []
    for idx in clusters:
        mu = complex(np.mean(eigs[idx]))
        r = tol.cluster_radius(len(idx), sc)
        re = abs(mu.real)
        if r < re < 10 * r:
            raise ToleranceError(f"eigenvalue {mu} too close to the imaginary axis")
        info.append((idx, mu, r, re <= r))
    if not all(on for *_, on in info):
        return None
    zero = []
    for idx, mu, r, _ in info:
        a = abs(mu.imag)
        if r < a < 10 * r:
            raise ToleranceError(f"eigenvalue {mu} too close to zero")
        zero.append(a <= r)
    all_zero = all(zero)
    if kind == "nilpotent" and not all_zero:
        return None

    def part(idx):
        return jordan_structure_at_cluster(T, Q, eigs, idx, scale, tol)[0]

    if all_zero and kind != "center":
        p = part(info[0][0])
        if field == "H":
            p = _halve(p)
        return StratumLabel(field, "nilpotent", n, p=p)

    if field == "C":
        blocks = [(len(idx), part(idx)) for idx, *_ in info]
        return StratumLabel("C", "center", n, xi=XiLabel.from_blocks(blocks))
    blocks, q = [], ()
    for (idx, mu, r, _), z in zip(info, zero):
        if z:
            q = part(idx)
        elif mu.imag > 0:
            blocks.append((len(idx), part(idx)))
    if field == "H":
        q = _halve(q)
    m = sum(s for s, _ in blocks)
    expected_rest = n - (2 * m if field == "R" else m)
    if sum(q) != expected_rest:
        raise ToleranceError("imaginary eigenvalues are not paired with their conjugates")
    return StratumLabel(field, "center", n, xi=XiLabel.from_blocks(blocks), m=m, q=q)
