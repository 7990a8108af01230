"""Synthetic mixture construction with controlled separation and eccentricity.

Covariances of eccentricity E are built by drawing the square roots of
their eigenvalues uniformly from [1, E] with the endpoints 1 and E always
included. Centers are packed as tightly as the c-separation requirement
allows: a regular simplex with every pairwise constraint tight.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np

from .errors import (
    BadDimsError,
    BadSeparationError,
    PackingError,
    TooManyComponentsError,
)
from .gaussians import Gaussian, Mixture
from .projection import random_orthonormal


class CovarianceMode(Enum):
    SPHERICAL_SHARED = "spherical-shared"
    DIAGONAL_DISTINCT = "diagonal-distinct"
    ROTATED_DISTINCT = "rotated-distinct"
    FULL_SHARED = "full-shared"


@dataclass(frozen=True)
class MixtureSpec:
    n: int
    k: int
    c: float
    E: float = 1.0
    covariance_mode: CovarianceMode = CovarianceMode.SPHERICAL_SHARED
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.E < 1:
            raise ValueError("eccentricity must be >= 1")
        if self.c < 0:
            raise ValueError("separation must be >= 0")


def eccentric_covariance(n: int, E: float, mode: CovarianceMode, seed) -> np.ndarray:
    """Covariance with eccentricity exactly E.

    Square-rooted eigenvalues: one pinned to 1, one to E (at random
    positions), the remaining n-2 uniform on [1, E]. Diagonal mode places
    them on the diagonal in random order; rotated/full modes conjugate by a
    random orthogonal matrix.
    """
    rng = np.random.default_rng(seed)
    if E == 1.0 or mode is CovarianceMode.SPHERICAL_SHARED:
        if E != 1.0:
            raise BadDimsError("spherical mode requires E = 1")
        return np.eye(n)
    if n < 2:
        raise BadDimsError("eccentricity > 1 needs dimension >= 2")
    roots = rng.uniform(1.0, E, size=n)
    pin = rng.choice(n, size=2, replace=False)
    roots[pin[0]] = 1.0
    roots[pin[1]] = E
    eigs = roots**2
    if mode is CovarianceMode.DIAGONAL_DISTINCT:
        return np.diag(eigs)
    # Random orthogonal basis via QR of a Gaussian matrix, R-diagonal signs
    # fixed positive so the distribution is Haar and the output seeded.
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    return (q * eigs) @ q.T


def packed_centers(k: int, n: int, c: float, radii, seed) -> np.ndarray:
    """k centers in R^n with every pair at distance exactly c*max(r_i, r_j).

    Built as a regular (k-1)-simplex in a uniformly random (k-1)-dimensional
    subspace; unequal radii are handled by iterative pairwise repair of the
    simplex shape.
    """
    if c <= 0:
        raise BadSeparationError("separation c must be > 0")
    if k > n + 1:
        raise TooManyComponentsError(
            f"simplex packing needs k <= n+1, got k={k}, n={n}"
        )
    radii = np.asarray(radii, dtype=float)
    if radii.shape != (k,):
        raise ValueError("need one radius per component")
    targets = np.zeros((k, k))
    for i, j in combinations(range(k), 2):
        targets[i, j] = targets[j, i] = c * max(radii[i], radii[j])

    # Regular unit-edge simplex coordinates in R^(k-1): center the standard
    # basis of R^k and rotate onto its (k-1)-dim span.
    verts = np.eye(k) - np.full((k, k), 1.0 / k)
    u, s, _ = np.linalg.svd(verts, full_matrices=False)
    coords = (u[:, : k - 1] * s[: k - 1]) / np.sqrt(2.0)  # unit edges

    rng = np.random.default_rng(seed)
    coords = coords * targets[targets > 0].mean() if k > 1 else coords
    if not np.allclose(radii, radii[0]):
        for _ in range(200):
            worst = 0.0
            for i, j in combinations(range(k), 2):
                diff = coords[i] - coords[j]
                dist = np.linalg.norm(diff)
                t = targets[i, j]
                worst = max(worst, abs(dist - t) / t)
                step = 0.5 * (dist - t) / dist
                coords[i] -= step * diff
                coords[j] += step * diff
            if worst < 1e-9:
                break
    else:
        coords = coords / np.linalg.norm(coords[0] - coords[1]) * targets[0, 1]

    for i, j in combinations(range(k), 2):
        err = abs(np.linalg.norm(coords[i] - coords[j]) - targets[i, j])
        if err > 1e-6 * targets[i, j]:
            raise PackingError(
                f"pair ({i},{j}) misses its distance target by {err:.3g}"
            )

    if k == 1:
        return np.zeros((1, n))
    basis = random_orthonormal(n, k - 1, rng.integers(0, 2**63)).rows
    return coords @ basis


def mixing_weights(k: int, seed) -> np.ndarray:
    """Near-uniform weights: i.i.d. uniform on [1/2k, 3/2k], renormalized."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)
    w = rng.uniform(1.0 / (2 * k), 3.0 / (2 * k), size=k)
    return w / w.sum()


def make_mixture(spec: MixtureSpec) -> Mixture:
    """Assemble the full synthetic mixture described by `spec`."""
    ss = np.random.SeedSequence(spec.seed)
    cov_seeds, center_seed, weight_seed = ss.spawn(spec.k), *ss.spawn(2)
    mode = spec.covariance_mode
    if mode in (CovarianceMode.SPHERICAL_SHARED, CovarianceMode.FULL_SHARED):
        shared = eccentric_covariance(spec.n, spec.E, mode, cov_seeds[0])
        covs = [shared] * spec.k
    else:
        covs = [
            eccentric_covariance(spec.n, spec.E, mode, s) for s in cov_seeds
        ]
    radii = np.sqrt([np.trace(cov) for cov in covs])
    centers = packed_centers(spec.k, spec.n, spec.c, radii, center_seed)
    weights = mixing_weights(spec.k, weight_seed)
    comps = [Gaussian(mu, cov) for mu, cov in zip(centers, covs)]
    return Mixture(comps, weights)
