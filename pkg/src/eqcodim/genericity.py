"""Monte Carlo transversality experiments on random polynomial families.

A family is a polynomial map from the box ``[-1, 1]^k`` into one of the
reduced matrix algebras, with Gaussian coefficients in the algebra's real
coordinates.  Two kinds of questions are asked:

* how often a random family meets a spectral condition (avoidance when the
  codimension exceeds ``k``, a positive rate otherwise);
* whether a hand-built family through a stratum keeps meeting it after its
  coefficients are perturbed (the persistence certificate).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize, minimize_scalar

from .linalg import DEFAULT_TOL, ToleranceConfig, to_real_vector
from .strata import (
    StratumLabel,
    ambient_basis,
    ambient_real_dim,
    parameter_directions,
    representative,
    sample_parameters,
    stratum_codim,
    tangent_generators,
)

HIT_TOL = 1e-8


# ---------------------------------------------------------------------------
# Algebra coordinates and families
# ---------------------------------------------------------------------------

class AlgebraSpec:
    """Real coordinates on ``mat(R,n)``, ``mat(C,n)`` or the quaternionic algebra."""

    def __init__(self, field: str, n: int):
        self.field = field
        self.n = int(n)
        self.dim = ambient_real_dim(field, n)
        mats = ambient_basis(field, n)
        self.size = mats[0].shape[0]
        self.dtype = float if field == "R" else complex
        self._basis = np.array(mats)  # (dim, size, size)
        self._norm2 = np.array([np.vdot(b, b).real for b in mats])

    def from_coords(self, c) -> np.ndarray:
        c = np.asarray(c, float)
        return np.tensordot(c, self._basis, axes=(-1, 0))

    def to_coords(self, X) -> np.ndarray:
        X = np.asarray(X)
        return np.real(np.einsum("kij,...ij->...k", self._basis.conj(), X)) / self._norm2

    def __repr__(self):
        return f"AlgebraSpec({self.field!r}, {self.n})"


def monomials(k: int, degree: int) -> List[Tuple[int, ...]]:
    """Exponent tuples of total degree ``<= degree``, graded then lexicographic."""
    out = []
    for d in range(degree + 1):
        out += sorted((e for e in itertools.product(range(d + 1), repeat=k) if sum(e) == d),
                      reverse=True)
    return out


@dataclass
class ParametricFamily:
    """``f(lam) = sum_j coefficient_j * lam**exponent_j`` on ``[-1, 1]^k``."""

    field: str
    n: int
    k: int
    degree: int
    exponents: List[Tuple[int, ...]]
    coefficients: np.ndarray  # (n_monomials, real dim)
    seed: Optional[int] = None

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, float)
        self.algebra = AlgebraSpec(self.field, self.n)
        if self.coefficients.shape != (len(self.exponents), self.algebra.dim):
            raise ValueError("coefficients do not match monomials and algebra dimension")

    @property
    def domain(self):
        return np.array([[-1.0, 1.0]] * self.k)

    def _monomial_values(self, lam) -> np.ndarray:
        lam = np.atleast_2d(np.asarray(lam, float))  # (pts, k)
        E = np.array(self.exponents, dtype=int).reshape(len(self.exponents), self.k)
        return np.prod(lam[:, None, :] ** E[None, :, :], axis=2)  # (pts, n_mon)

    def coords(self, lam) -> np.ndarray:
        return self._monomial_values(lam) @ self.coefficients

    def __call__(self, lam) -> np.ndarray:
        """Matrix at one parameter point."""
        return self.algebra.from_coords(self.coords(np.reshape(lam, (1, self.k)))[0])

    def evaluate_many(self, pts) -> np.ndarray:
        return self.algebra.from_coords(self.coords(pts))

    def jacobian(self, lam) -> np.ndarray:
        """Real coordinates of ``d f / d lam_i`` as columns."""
        lam = np.asarray(lam, float).reshape(self.k)
        cols = []
        for i in range(self.k):
            vals = []
            for e in self.exponents:
                if e[i] == 0:
                    vals.append(0.0)
                    continue
                e2 = list(e)
                e2[i] -= 1
                vals.append(e[i] * np.prod(lam ** np.array(e2)))
            cols.append(np.array(vals) @ self.coefficients)
        return np.array(cols).T.reshape(self.algebra.dim, self.k)

    def perturbed(self, eps: float, rng) -> "ParametricFamily":
        G = rng.standard_normal(self.coefficients.shape)
        scale = eps * max(np.linalg.norm(self.coefficients), 1.0) / np.linalg.norm(G)
        return ParametricFamily(self.field, self.n, self.k, self.degree, list(self.exponents),
                                self.coefficients + scale * G, self.seed)

    def to_dict(self):
        return {"field": self.field, "n": self.n, "k": self.k, "degree": self.degree,
                "exponents": [list(e) for e in self.exponents],
                "coefficients": self.coefficients.tolist()}


def random_family(field: str, n: int, k: int, degree: int, seed) -> ParametricFamily:
    """Gaussian coefficients for every monomial of total degree ``<= degree``."""
    if k < 0 or degree < 0:
        raise ValueError("k and degree must be non-negative")
    exps = monomials(k, degree)
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((len(exps), ambient_real_dim(field, n)))
    s = seed if isinstance(seed, (int, np.integer)) else None
    return ParametricFamily(field, n, k, degree, exps, coeffs, s)


# ---------------------------------------------------------------------------
# Distance proxies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneralizedKernel:
    """Generalized kernel of dimension at least ``d``: the d-th smallest ``|eigenvalue|``."""

    d: int

    def __call__(self, eigs: np.ndarray) -> np.ndarray:
        return np.sort(np.abs(eigs), axis=-1)[..., self.d - 1]

    def describe(self):
        return {"predicate": "generalized-kernel", "d": self.d}


@dataclass(frozen=True)
class CenterSubspace:
    """Center subspace of dimension at least ``d``: the d-th smallest ``|Re eigenvalue|``."""

    d: int

    def __call__(self, eigs: np.ndarray) -> np.ndarray:
        return np.sort(np.abs(eigs.real), axis=-1)[..., self.d - 1]

    def describe(self):
        return {"predicate": "center-subspace", "d": self.d}


def predicate_for(field: str, n: int, kind: str, d: Optional[int] = None):
    """Spectral condition of the ``kind`` strata; ``d`` defaults to the full size."""
    size = 2 * n if field == "H" else n
    d = size if d is None else int(d)
    if not 1 <= d <= size:
        raise ValueError(f"d must lie in 1..{size}")
    return GeneralizedKernel(d) if kind == "nilpotent" else CenterSubspace(d)


def stratum_distance(f, lam, predicate) -> float:
    """Value of the distance proxy of ``predicate`` at ``f(lam)``."""
    M = f(lam) if callable(f) else np.asarray(f)
    return float(predicate(np.linalg.eigvals(M)))


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

@dataclass
class SearchConfig:
    grid: int = 512
    grid_2d: int = 64
    starts: int = 64
    refine_best: int = 4
    refine_best_high: int = 2
    xatol: float = 1e-15
    maxiter: int = 200
    maxfev_per_dim: int = 150


@dataclass
class HitReport:
    label: dict
    trial: int
    events: List[Tuple[List[float], float]]
    verdict: str
    seed: int
    hit_tol: float = HIT_TOL

    def to_dict(self):
        return {"label": self.label, "trial": self.trial, "seed": self.seed,
                "verdict": self.verdict, "hit_tol": self.hit_tol,
                "events": [{"point": list(map(float, p)), "distance": float(v)}
                           for p, v in self.events]}


def _proxy_many(fam: ParametricFamily, pts, predicate):
    return predicate(np.linalg.eigvals(fam.evaluate_many(pts)))


def minimize_distance(fam: ParametricFamily, predicate, cfg: SearchConfig = SearchConfig(),
                      rng=None) -> List[Tuple[List[float], float]]:
    """Refined local minima of the distance proxy over the parameter box.

    ``k = 1``: scan ``cfg.grid`` points, refine every grid local minimum by
    bounded Brent.  ``k = 2``: scan a ``cfg.grid_2d`` square grid, refine the
    best local minima by Nelder-Mead.  Larger ``k``: random starts instead of
    a grid.  Returns ``(point, value)`` pairs sorted by value.
    """
    k = fam.k
    if k == 0:
        return [([], float(_proxy_many(fam, np.zeros((1, 0)), predicate)[0]))]
    obj = lambda x: float(_proxy_many(fam, np.clip(np.reshape(x, (1, k)), -1, 1), predicate)[0])
    events = []
    if k == 1:
        xs = np.linspace(-1, 1, cfg.grid)
        vals = _proxy_many(fam, xs[:, None], predicate)
        for i in range(cfg.grid):
            left = vals[i - 1] if i > 0 else np.inf
            right = vals[i + 1] if i < cfg.grid - 1 else np.inf
            if vals[i] <= left and vals[i] <= right:
                a, b = xs[max(i - 1, 0)], xs[min(i + 1, cfg.grid - 1)]
                res = minimize_scalar(lambda t: obj([t]), bounds=(a, b), method="bounded",
                                      options={"xatol": cfg.xatol, "maxiter": 500})
                if a < res.x < b and res.fun < min(obj([a]), obj([b])):
                    # bounded Brent stops near sqrt(eps) in x; golden section does not
                    res = minimize_scalar(lambda t: obj([t]), bracket=(a, res.x, b), method="golden",
                                          options={"xtol": cfg.xatol, "maxiter": 500})
                best = (res.x, res.fun) if res.fun < vals[i] else (xs[i], vals[i])
                events.append(([float(best[0])], float(best[1])))
    else:
        if k == 2:
            g = np.linspace(-1, 1, cfg.grid_2d)
            pts = np.array(list(itertools.product(g, g)))
        else:
            rng = np.random.default_rng(rng)
            pts = rng.uniform(-1, 1, size=(cfg.starts, k))
        vals = _proxy_many(fam, pts, predicate)
        nbest = cfg.refine_best if k == 2 else cfg.refine_best_high
        opts = {"xatol": 1e-12, "fatol": 1e-16, "maxiter": cfg.maxiter * k}
        opts["maxfev"] = cfg.maxfev_per_dim * k
        for j in np.argsort(vals)[:nbest]:
            res = minimize(obj, pts[j], method="Nelder-Mead", options=opts)
            x = np.clip(res.x, -1, 1)
            v = obj(x)
            if v > vals[j]:
                x, v = pts[j], vals[j]
            events.append((list(map(float, x)), float(v)))
    events.sort(key=lambda e: e[1])
    return events


def trial_seeds(seed: int, trials: int) -> List[np.random.SeedSequence]:
    """Per-trial seed sequences; the first ``t`` agree for every ``trials >= t``."""
    return np.random.SeedSequence(seed).spawn(trials)


def _seed_int(ss: np.random.SeedSequence) -> int:
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def monte_carlo(field: str, n: int, predicate, k: int, trials: int, seed: int,
                degree: int = 3, hit_tol: float = HIT_TOL, cfg: SearchConfig = SearchConfig(),
                label: Optional[dict] = None, keep_events: int = 3):
    """Fraction of random families whose refined distance falls below ``hit_tol``.

    Returns ``(hit_fraction, reports)`` with one :class:`HitReport` per trial.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    label = label or {"field": field, "n": n, **predicate.describe()}
    reports = []
    for t, ss in enumerate(trial_seeds(seed, trials)):
        s = _seed_int(ss)
        fam = random_family(field, n, k, degree, s)
        events = minimize_distance(fam, predicate, cfg, rng=s)
        hit = bool(events) and events[0][1] < hit_tol
        reports.append(HitReport(label, t, events[:keep_events], "hit" if hit else "miss", s, hit_tol))
    frac = sum(r.verdict == "hit" for r in reports) / trials
    return frac, reports


# ---------------------------------------------------------------------------
# Witness families
# ---------------------------------------------------------------------------

@dataclass
class WitnessCertificate:
    label: StratumLabel
    codim: int
    k: int
    distances: List[float]
    passed: int
    trials: int
    eps: float
    hit_tol: float

    @property
    def ok(self) -> bool:
        return self.passed == self.trials

    def to_dict(self):
        return {"label": self.label.to_dict(), "codim": self.codim, "k": self.k,
                "distances": [float(d) for d in self.distances], "passed": self.passed,
                "trials": self.trials, "eps": self.eps, "hit_tol": self.hit_tol}


def _expm_algebra(V):
    return sla.expm(V)


def chart_residual(fam: ParametricFamily, label: StratumLabel, x0, lam0=None,
                   max_iter: int = 60) -> Tuple[float, np.ndarray]:
    """Distance from the family to the stratum, found by Gauss-Newton.

    Solves ``f(lam) = g^-1 (X(x + w)) g`` for ``lam``, ``g`` in the group
    of the algebra and a shift ``w`` of the stratum parameters, starting at
    ``lam0``, ``g = Id``, ``w = 0``.  The returned distance is the final
    residual norm relative to ``max(1, |f(lam)|)``; the stratum is met
    when it vanishes.
    """
    A = fam.algebra
    k = fam.k
    lam = np.zeros(k) if lam0 is None else np.asarray(lam0, float).copy()
    x = np.asarray(x0, float).copy()
    g = np.eye(A.size, dtype=A.dtype)
    gi = g.copy()
    basis = ambient_basis(label.field, label.n)
    best = np.inf
    for _ in range(max_iter):
        X = representative(label, x) if len(x) else representative(label)
        Y = gi @ X @ g
        F = fam(lam)
        R = F - Y
        r = np.linalg.norm(R) / max(1.0, np.linalg.norm(F))
        best = min(best, r)
        if r < 1e-14:
            break
        cols = [fam.jacobian(lam)[:, i] for i in range(k)]
        cols += [-A.to_coords(Y @ V - V @ Y) for V in basis]
        cols += [-A.to_coords(gi @ D @ g) for D in parameter_directions(label)]
        J = np.array(cols).T
        step = np.linalg.lstsq(J, -A.to_coords(R), rcond=None)[0]
        dlam, rest = step[:k], step[k:]
        dv, dw = rest[: len(basis)], rest[len(basis):]
        lam = lam + dlam
        Vm = sum(c * B for c, B in zip(dv, basis))
        g = g @ _expm_algebra(Vm)
        gi = _expm_algebra(-Vm) @ gi
        if len(dw):
            x = x + dw
        if np.any(np.abs(lam) > 1) or (len(x) and (np.any(x <= 0) if label.field != "C" else False)):
            return float(np.inf), lam
    return float(best), lam


def witness_family(label: StratumLabel, k: Optional[int] = None, seed: int = 0,
                   tol: ToleranceConfig = DEFAULT_TOL):
    """Affine family through a stratum sample along a tangent complement.

    ``f(lam) = X0 + sum_{i<c} lam_i E_i`` where the ``E_i`` span the
    orthogonal complement of the tangent space at ``X0``.  Extra parameters
    beyond the codimension get zero coefficients.  Returns
    ``(family, x0)`` with ``x0`` the stratum parameters of ``X0``.
    """
    c = stratum_codim(label, tol=tol)
    k = c if k is None else int(k)
    if k < c:
        raise ValueError(f"witness family needs k >= codim = {c}")
    x0 = sample_parameters(label, seed)
    X0 = representative(label, x0, tol)
    A = AlgebraSpec(label.field, label.n)
    T = tangent_generators(label, X0)  # rows: real vectors of tangent elements
    # real vectors of basis matrices, to express the complement in coordinates
    Bv = np.array([to_real_vector(b) for b in ambient_basis(label.field, label.n)])
    Tc = np.linalg.lstsq(Bv.T, T.T, rcond=None)[0]  # tangent in algebra coordinates
    G = np.diag(A._norm2)
    # complement w.r.t. the Frobenius inner product on the algebra
    u, s, vh = np.linalg.svd((G @ Tc).T)
    r = int(np.sum(s > tol.rank_tol * max(s[0], 1.0)))
    comp = vh[r:].T
    if comp.shape[1] != c:
        raise ValueError("tangent complement has unexpected dimension")
    E = comp / np.sqrt(A._norm2)[:, None]
    exps = monomials(k, 1)
    coeffs = np.zeros((len(exps), A.dim))
    coeffs[0] = A.to_coords(X0)
    for i in range(c):
        coeffs[1 + i] = E[:, i] / np.linalg.norm(A.from_coords(E[:, i]))
    return ParametricFamily(label.field, label.n, k, 1, exps, coeffs, seed), x0


def witness_certificate(label: StratumLabel, k: Optional[int] = None, perturbations: int = 20,
                        eps: float = 1e-3, seed: int = 0, hit_tol: float = HIT_TOL,
                        tol: ToleranceConfig = DEFAULT_TOL) -> WitnessCertificate:
    """Check that perturbed copies of the witness family still meet the stratum."""
    fam, x0 = witness_family(label, k, seed, tol)
    rng = np.random.default_rng(seed)
    dists = []
    for _ in range(perturbations):
        pert = fam.perturbed(eps, rng)
        d, _ = chart_residual(pert, label, x0)
        dists.append(d)
    passed = sum(d < hit_tol for d in dists)
    return WitnessCertificate(label, stratum_codim(label, tol=tol), fam.k, dists, passed,
                              perturbations, eps, hit_tol)
