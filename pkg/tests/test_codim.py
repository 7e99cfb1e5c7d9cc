import math

import numpy as np
import pytest

from eqcodim.algebra import DecompositionDescriptor
from eqcodim.codim import (
    C_U,
    K_U,
    SubDescriptor,
    catalog,
    product_codim,
    reduced_algebras,
    sub_descriptors,
    top_product_codim,
)
from eqcodim.strata import closed_form_codim, stratum_codim, top_label

from conftest import REP_FIXTURES, load_rep_fixture


def W(r=(), c=(), h=()):
    return DecompositionDescriptor(tuple((m, 1) for m in r), tuple((m, 2) for m in c),
                                   tuple((m, 4) for m in h))


def entries(lst):
    return [(e.U.r, e.U.c, e.U.h) for e in lst]


def random_descriptor(rng):
    draw = lambda: tuple(int(x) for x in rng.integers(1, 5, size=rng.integers(0, 3)))
    return W(draw(), draw(), draw())


# -- formulas ---------------------------------------------------------------

@pytest.mark.parametrize("desc, K", [(W(r=[1]), 1), (W(r=[1, 2], c=[1], h=[1]), 9), (W(), 0)])
def test_K_examples(desc, K):
    assert K_U(desc) == K


@pytest.mark.parametrize("desc, C", [
    (W(r=[2]), 1), (W(c=[1]), 1), (W(h=[1]), 1), (W(r=[3]), 2), (W(), 0),
])
def test_C_examples(desc, C):
    assert C_U(desc) == C


def test_formulas_on_random_descriptors():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        d = random_descriptor(rng)
        r, c, h = d.r, d.c, d.h
        assert K_U(d) == sum(r) + 2 * sum(c) + 4 * sum(h)
        assert C_U(d) == sum(math.ceil(x / 2) for x in r) + sum(c) + sum(h)
        assert C_U(d) <= K_U(d)


def test_monotone_under_increase():
    rng = np.random.default_rng(1)
    for _ in range(300):
        d = random_descriptor(rng)
        for U in sub_descriptors(d):
            assert K_U(U) <= K_U(d) and C_U(U) <= C_U(d)


# -- sub-descriptors --------------------------------------------------------

def test_sub_descriptor_validation():
    w = W(r=[2], c=[1])
    SubDescriptor(w, (1,), (0,), ())
    with pytest.raises(ValueError):
        SubDescriptor(w, (3,), (0,), ())
    with pytest.raises(ValueError):
        SubDescriptor(w, (1, 1), (0,), ())


def test_lattice_size_and_cutoff():
    w = W(r=[2, 1], c=[3], h=[1])
    subs = list(sub_descriptors(w))
    assert len(subs) == 3 * 2 * 4 * 2 == len(set(subs))
    assert len(list(sub_descriptors(w, cutoff=5))) == 5


# -- catalog ----------------------------------------------------------------

def test_catalog_k1_example():
    steady, hopf = catalog(W(r=[2], c=[1]), 1)
    assert entries(steady) == [((0,), (0,), ()), ((1,), (0,), ())]
    assert sorted(entries(hopf)) == sorted([((0,), (0,), ()), ((2,), (0,), ()), ((0,), (1,), ())])
    assert [e.interpretation for e in steady] == ["trivial", "steady-state"]
    assert all(e.C == 1 for e in hopf if e.interpretation != "trivial")


def test_catalog_k0_is_trivial_only():
    steady, hopf = catalog(W(r=[2, 1], c=[1], h=[2]), 0)
    assert [e.interpretation for e in steady] == ["trivial"]
    assert [e.interpretation for e in hopf] == ["trivial"]


def test_catalog_quaternionic_examples():
    steady, hopf = catalog(W(h=[1]), 3)
    assert [e.interpretation for e in steady] == ["trivial"]
    assert ((), (), (1,)) in entries(hopf)
    _, hopf = catalog(W(h=[2]), 2)
    assert [(e.U.h, e.C) for e in hopf if e.interpretation != "trivial"] == [((1,), 1), ((2,), 2)]


def test_catalog_rejects_negative_k():
    with pytest.raises(ValueError):
        catalog(W(r=[1]), -1)


@pytest.mark.parametrize("seed", range(20))
def test_catalog_k1_single_type_rule(seed):
    rng = np.random.default_rng(seed)
    w = random_descriptor(rng)
    steady, hopf = catalog(w, 1)
    for e in steady[1:]:
        # exactly one real block with multiplicity one
        assert sum(e.U.r) == 1 and not any(e.U.c) and not any(e.U.h)
    for e in hopf[1:]:
        nonzero = [x for x in e.U.r + e.U.c + e.U.h if x]
        assert len(nonzero) == 1
        assert e.U.r and sum(e.U.r) == 2 or sum(e.U.c) == 1 or sum(e.U.h) == 1
    # counts from the ambient descriptor alone
    assert len(steady) - 1 == len(w.r)
    assert len(hopf) - 1 == sum(1 for m in w.r if m >= 2) + len(w.c) + len(w.h)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 5])
def test_catalog_is_threshold_filter(k):
    w = W(r=[3, 1], c=[2], h=[1])
    steady, hopf = catalog(w, k)
    assert {(e.U.r, e.U.c, e.U.h) for e in steady[1:]} == {
        (U.r, U.c, U.h) for U in sub_descriptors(w) if not U.is_empty and K_U(U) <= k}
    for e in hopf[1:]:
        assert e.C <= k


# -- product strata ---------------------------------------------------------

def test_product_codim_examples():
    w = W(r=[2], c=[1])
    assert reduced_algebras(w) == [("R", 2), ("C", 1)]
    assert top_product_codim(w, "nilpotent") == 4 == K_U(w)
    assert top_product_codim(w, "center") == 2 == C_U(w)
    lab = top_label("H", 2, "nilpotent")
    assert product_codim([lab]) == stratum_codim(lab) == 8


@pytest.mark.parametrize("field", ["R", "C", "H"])
@pytest.mark.parametrize("n", range(1, 5))
def test_single_isotypic_cross_consistency(field, n):
    d = {"R": W(r=[n]), "C": W(c=[n]), "H": W(h=[n])}[field]
    assert K_U(d) == stratum_codim(top_label(field, n, "nilpotent")) == closed_form_codim(field, n, "nilpotent")
    assert C_U(d) == stratum_codim(top_label(field, n, "center")) == closed_form_codim(field, n, "center")


@pytest.mark.parametrize("name", REP_FIXTURES)
def test_fixture_cross_consistency(name):
    _, desc, _ = load_rep_fixture(name)
    for U in sub_descriptors(desc):
        assert K_U(U) == top_product_codim(U, "nilpotent")
        assert C_U(U) == top_product_codim(U, "center")
