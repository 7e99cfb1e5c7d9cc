import json
from pathlib import Path

import numpy as np
import pytest
import scipy.linalg as sla

from eqcodim.algebra import DecompositionDescriptor
from eqcodim.serialize import rep_from_json
from eqcodim.strata import quat_from_blocks

FIXTURES = Path(__file__).parent / "fixtures"
REP_FIXTURES = sorted(p.stem[len("rep_"):] for p in FIXTURES.glob("rep_*.json"))


def load_rep_fixture(name):
    data = json.loads((FIXTURES / f"rep_{name}.json").read_text())
    return rep_from_json(data["rep"]), DecompositionDescriptor.from_dict(data["expected"]), data


def random_in_algebra(field, n, rng):
    g = lambda: rng.standard_normal((n, n))
    if field == "R":
        return g()
    if field == "C":
        return g() + 1j * g()
    return quat_from_blocks(g() + 1j * g(), g() + 1j * g())


def well_conditioned(field, n, rng, bound=1e3):
    while True:
        C = random_in_algebra(field, n, rng)
        if np.linalg.cond(C) < bound:
            return C


def brute_commutant_dim(gens, N):
    """Kernel of the commutation equations, one row per (generator, entry)."""
    rows = []
    for g in gens:
        for i in range(N):
            for j in range(N):
                row = np.zeros((N, N))
                # (X g - g X)_{ij} = sum_k X_ik g_kj - g_ik X_kj
                row[i, :] += g[:, j]
                row[:, j] -= g[i, :]
                rows.append(row.ravel())
    if not rows:
        return N * N
    return sla.null_space(np.array(rows)).shape[1]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
