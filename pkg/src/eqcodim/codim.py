"""Codimension numbers ``K_U``, ``C_U`` and the k-parameter catalog."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .algebra import DecompositionDescriptor
from .strata import StratumLabel, stratum_codim, top_label


@dataclass(frozen=True)
class SubDescriptor:
    """Sub-multiplicities aligned with the blocks of an ambient descriptor."""

    ambient: DecompositionDescriptor
    r: Tuple[int, ...]
    c: Tuple[int, ...]
    h: Tuple[int, ...]

    def __post_init__(self):
        for sub, amb in ((self.r, self.ambient.r), (self.c, self.ambient.c), (self.h, self.ambient.h)):
            if len(sub) != len(amb):
                raise ValueError("sub-multiplicities must align with the ambient blocks")
            if any(not 0 <= s <= a for s, a in zip(sub, amb)):
                raise ValueError("sub-multiplicities must satisfy 0 <= r' <= r")

    @classmethod
    def full(cls, W: DecompositionDescriptor) -> "SubDescriptor":
        return cls(W, tuple(W.r), tuple(W.c), tuple(W.h))

    @property
    def is_empty(self) -> bool:
        return not any(self.r) and not any(self.c) and not any(self.h)

    def to_dict(self):
        pick = lambda sub, blocks: [{"mult": s, "dim": d} for s, (_, d) in zip(sub, blocks) if s]
        return {"real": pick(self.r, self.ambient.real_blocks),
                "complex": pick(self.c, self.ambient.complex_blocks),
                "quaternionic": pick(self.h, self.ambient.quat_blocks)}


Desc = Union[SubDescriptor, DecompositionDescriptor]


def _mults(d: Desc):
    return list(d.r), list(d.c), list(d.h)


def K_U(d: Desc) -> int:
    """``sum r' + 2 sum c' + 4 sum h'``."""
    r, c, h = _mults(d)
    return sum(r) + 2 * sum(c) + 4 * sum(h)


def C_U(d: Desc) -> int:
    """``sum ceil(r'/2) + sum c' + sum h'``."""
    r, c, h = _mults(d)
    return sum((x + 1) // 2 for x in r) + sum(c) + sum(h)


def _only_simple_real(U: SubDescriptor) -> bool:
    # real blocks of multiplicity one have real spectrum only
    return not any(U.c) and not any(U.h) and all(x <= 1 for x in U.r)


@dataclass(frozen=True)
class CatalogEntry:
    U: SubDescriptor
    K: int
    C: int
    interpretation: str

    def to_dict(self):
        return {"descriptor": self.U.to_dict(), "K": self.K, "C": self.C,
                "interpretation": self.interpretation}


def sub_descriptors(W: DecompositionDescriptor, cutoff: Optional[int] = None) -> Iterable[SubDescriptor]:
    """Every componentwise-dominated sub-descriptor, at most ``cutoff`` of them."""
    ranges = [range(m + 1) for m in W.r + W.c + W.h]
    nr, nc = len(W.r), len(W.c)
    for count, combo in enumerate(itertools.product(*ranges)):
        if cutoff is not None and count >= cutoff:
            return
        yield SubDescriptor(W, combo[:nr], combo[nr:nr + nc], combo[nr + nc:])


def catalog(W: DecompositionDescriptor, k: int, cutoff: Optional[int] = None):
    """Generic ``k``-parameter steady-state and Hopf candidates.

    Returns ``(steady, hopf)``.  Both contain the empty ``U`` (labelled
    ``"trivial"``).  Non-empty ``U`` built only from real blocks of
    multiplicity at most one are left out of the Hopf list, since such
    summands carry no non-real eigenvalues.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    steady: List[CatalogEntry] = []
    hopf: List[CatalogEntry] = []
    for U in sub_descriptors(W, cutoff):
        K, C = K_U(U), C_U(U)
        if U.is_empty:
            steady.append(CatalogEntry(U, K, C, "trivial"))
            hopf.append(CatalogEntry(U, K, C, "trivial"))
            continue
        if K <= k:
            steady.append(CatalogEntry(U, K, C, "steady-state"))
        if C <= k and not _only_simple_real(U):
            hopf.append(CatalogEntry(U, K, C, "hopf-candidate"))
    key = lambda e: (e.K, e.C, e.U.r, e.U.c, e.U.h)
    return sorted(steady, key=key), sorted(hopf, key=lambda e: (e.C, e.K, e.U.r, e.U.c, e.U.h))


def reduced_algebras(d: Desc) -> List[Tuple[str, int]]:
    """``(field, n)`` of each reduced matrix algebra factor."""
    r, c, h = _mults(d)
    return [("R", m) for m in r if m] + [("C", m) for m in c if m] + [("H", m) for m in h if m]


def product_codim(labels: Sequence[StratumLabel]) -> int:
    """Codimension of a product of strata: the sum of the factor codims."""
    return sum(stratum_codim(lab) for lab in labels)


def top_product_codim(d: Desc, kind: str) -> int:
    """Product codim of the top ``kind`` strata over all reduced algebra factors."""
    return product_codim([top_label(f, n, kind) for f, n in reduced_algebras(d)])
