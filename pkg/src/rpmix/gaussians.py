"""Multivariate Gaussians, mixtures, and their geometry.

Everything here works in units natural to high dimension: the radius of a
Gaussian is sqrt(trace(Sigma)), eccentricity is sqrt(lambda_max/lambda_min),
and two components are c-separated when their means are at least c radii
apart (using the larger of the two radii).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .errors import (
    DimensionMismatchError,
    IllConditionedError,
    NotPositiveDefiniteError,
    TooFewComponentsError,
)

SYMMETRY_RTOL = 1e-9
CONDITION_LIMIT = 1e12

FLOAT_FMT = "%.17g"


def _as_float_array(x, name="array"):
    a = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


class Gaussian:
    """An n-dimensional Gaussian N(mean, covariance).

    The covariance must be symmetric (within 1e-9 relative, max-abs scale)
    and positive definite; it is symmetrized once on construction and both
    arrays are frozen, so instances are safe to share across threads.
    """

    def __init__(self, mean, covariance):
        mean = _as_float_array(mean, "mean")
        cov = _as_float_array(covariance, "covariance")
        if mean.ndim != 1:
            raise ValueError("mean must be a vector")
        n = mean.shape[0]
        if cov.shape != (n, n):
            raise DimensionMismatchError(
                f"covariance shape {cov.shape} does not match dimension {n}"
            )
        scale = np.max(np.abs(cov)) if cov.size else 0.0
        asym = np.max(np.abs(cov - cov.T)) if cov.size else 0.0
        if scale > 0 and asym > SYMMETRY_RTOL * scale:
            raise NotPositiveDefiniteError(
                f"covariance is not symmetric (asymmetry {asym:.3g} at scale {scale:.3g})"
            )
        cov = (cov + cov.T) / 2.0
        try:
            chol = cholesky(cov, lower=True)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError(str(exc)) from exc
        self.mean = mean
        self.covariance = cov
        self._chol = chol
        self._eigs = None
        for a in (self.mean, self.covariance, self._chol):
            a.setflags(write=False)

    @property
    def dim(self):
        return self.mean.shape[0]

    @property
    def chol(self):
        """Lower-triangular Cholesky factor of the covariance."""
        return self._chol

    @property
    def eigenvalues(self):
        """Ascending covariance eigenvalues (computed once, cached)."""
        if self._eigs is None:
            self._eigs = np.linalg.eigvalsh(self.covariance)
            self._eigs.setflags(write=False)
        return self._eigs

    @property
    def condition_number(self):
        lam = self.eigenvalues
        return lam[-1] / lam[0] if lam[0] > 0 else np.inf

    @property
    def log_det(self):
        return 2.0 * np.sum(np.log(np.diag(self._chol)))

    def __repr__(self):
        return f"Gaussian(dim={self.dim})"


class Mixture:
    """A weighted mixture of Gaussians of a common dimension."""

    def __init__(self, components, weights):
        components = list(components)
        if not components:
            raise ValueError("mixture needs at least one component")
        n = components[0].dim
        for g in components:
            if g.dim != n:
                raise DimensionMismatchError("components have differing dimensions")
        w = _as_float_array(weights, "weights")
        if w.shape != (len(components),):
            raise ValueError("one weight per component required")
        if np.any(w <= 0):
            raise ValueError("weights must all be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        self.components = tuple(components)
        self.weights = w
        self.weights.setflags(write=False)

    @property
    def k(self):
        return len(self.components)

    @property
    def dim(self):
        return self.components[0].dim

    @property
    def means(self):
        return np.array([g.mean for g in self.components])

    def __repr__(self):
        return f"Mixture(k={self.k}, dim={self.dim})"


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray  # sorted ascending
    eccentricity: float
    trace: float


def _check_conditioning(g: Gaussian):
    if g.condition_number >= CONDITION_LIMIT:
        raise IllConditionedError(
            f"covariance condition number {g.condition_number:.3g} >= {CONDITION_LIMIT:g}"
        )


def log_density(g: Gaussian, x) -> float:
    """Log of the Gaussian density at a single point x."""
    x = _as_float_array(x, "x")
    if x.shape != (g.dim,):
        raise DimensionMismatchError(f"point has shape {x.shape}, expected ({g.dim},)")
    _check_conditioning(g)
    y = solve_triangular(g.chol, x - g.mean, lower=True)
    return -0.5 * g.dim * np.log(2.0 * np.pi) - 0.5 * g.log_det - 0.5 * float(y @ y)


def log_density_batch(g: Gaussian, points) -> np.ndarray:
    """Log-density at every row of a dataset; one triangular solve batch."""
    pts = np.atleast_2d(_as_float_array(points, "points"))
    if pts.shape[1] != g.dim:
        raise DimensionMismatchError(
            f"points have dimension {pts.shape[1]}, expected {g.dim}"
        )
    _check_conditioning(g)
    y = solve_triangular(g.chol, (pts - g.mean).T, lower=True)
    quad = np.sum(y * y, axis=0)
    return -0.5 * g.dim * np.log(2.0 * np.pi) - 0.5 * g.log_det - 0.5 * quad


def mahalanobis(g: Gaussian, x) -> float:
    """Distance from the center in the Gaussian's own metric."""
    x = _as_float_array(x, "x")
    if x.shape != (g.dim,):
        raise DimensionMismatchError(f"point has shape {x.shape}, expected ({g.dim},)")
    _check_conditioning(g)
    y = solve_triangular(g.chol, x - g.mean, lower=True)
    return float(np.sqrt(y @ y))


def spectral_summary(cov) -> SpectralSummary:
    """Eigenvalues, eccentricity sqrt(l_max/l_min), and trace of a PD matrix."""
    cov = _as_float_array(cov, "covariance")
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError("covariance must be square")
    scale = np.max(np.abs(cov))
    if scale > 0 and np.max(np.abs(cov - cov.T)) > SYMMETRY_RTOL * scale:
        raise NotPositiveDefiniteError("matrix is not symmetric")
    lam = np.linalg.eigvalsh((cov + cov.T) / 2.0)
    if lam[0] <= 0:
        raise NotPositiveDefiniteError(f"smallest eigenvalue {lam[0]!r} <= 0")
    lam.setflags(write=False)
    return SpectralSummary(
        eigenvalues=lam,
        eccentricity=float(np.sqrt(lam[-1] / lam[0])),
        trace=float(lam.sum()),
    )


def radius(g: Gaussian) -> float:
    """sqrt(trace(Sigma)): the root expected squared distance from the mean."""
    return float(np.sqrt(np.trace(g.covariance)))


def pairwise_separation(g1: Gaussian, g2: Gaussian) -> float:
    """Mean distance in units of the larger trace-radius."""
    if g1.dim != g2.dim:
        raise DimensionMismatchError("Gaussians have differing dimensions")
    denom = np.sqrt(max(np.trace(g1.covariance), np.trace(g2.covariance)))
    return float(np.linalg.norm(g1.mean - g2.mean) / denom)


def mixture_separation(m: Mixture) -> float:
    """Minimum pairwise separation over all component pairs."""
    if m.k < 2:
        raise TooFewComponentsError("separation needs at least two components")
    return min(
        pairwise_separation(a, b) for a, b in combinations(m.components, 2)
    )


def sample(m: Mixture, count: int, seed) -> np.ndarray:
    """Draw `count` i.i.d. points from the mixture; deterministic in `seed`."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    comps = rng.choice(m.k, size=count, p=m.weights)
    z = rng.standard_normal((count, m.dim))
    out = np.empty((count, m.dim))
    for i, g in enumerate(m.components):
        rows = comps == i
        if np.any(rows):
            out[rows] = z[rows] @ g.chol.T + g.mean
    return out


def norm_tail_bound(n: int, eps: float) -> float:
    """Upper bound 2 exp(-n eps^2 / 24) on P(| ||X||^2/n - 1 | > eps), X ~ N(0, I_n)."""
    return 2.0 * np.exp(-n * eps * eps / 24.0)


# ---------------------------------------------------------------------------
# Serialization

def mixture_to_dict(m: Mixture) -> dict:
    return {
        "weights": m.weights.tolist(),
        "means": [g.mean.tolist() for g in m.components],
        "covariances": [g.covariance.tolist() for g in m.components],
    }


def mixture_from_dict(doc: dict) -> Mixture:
    comps = [
        Gaussian(mu, cov) for mu, cov in zip(doc["means"], doc["covariances"])
    ]
    return Mixture(comps, doc["weights"])


def save_mixture(m: Mixture, path):
    with open(path, "w") as f:
        json.dump(mixture_to_dict(m), f)


def load_mixture(path) -> Mixture:
    with open(path) as f:
        return mixture_from_dict(json.load(f))


def save_dataset(points, path, header=None):
    """Write one point per CSV row at full double precision."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    with open(path, "w") as f:
        if header is not None:
            f.write(",".join(header) + "\n")
        for row in points:
            f.write(",".join(FLOAT_FMT % v for v in row) + "\n")


def load_dataset(path, skip_header=False) -> np.ndarray:
    rows = []
    with open(path) as f:
        if skip_header:
            f.readline()
        for line in f:
            line = line.strip()
            if line:
                rows.append([float(v) for v in line.split(",")])
    return np.array(rows, dtype=float)
