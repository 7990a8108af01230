"""EM for Gaussian mixtures and the random-projection hybrid.

Two covariance regimes are supported: every component owns a full
covariance (FULL_DISTINCT), or all components share a single pooled full
covariance (SHARED_FULL). The hybrid projects the data randomly, runs EM
to convergence in low dimension, lifts the final responsibilities back to
the original data, and performs exactly one high-dimensional EM step.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import permutations

import numpy as np
from scipy.special import logsumexp

from .errors import (
    DimensionMismatchError,
    DuplicatePointsError,
    EmptyComponentError,
    IllConditionedError,
    NotEnoughDataError,
    NotPositiveDefiniteError,
    ShapeMismatchError,
)
from .gaussians import Gaussian, Mixture, log_density_batch, radius
from .projection import ProjectionMatrix, project_data, random_orthonormal

EMPTY_COMPONENT_FRACTION = 1e-10
MAX_RESCUES = 2


class CovarianceRestriction(Enum):
    FULL_DISTINCT = "full-distinct"
    SHARED_FULL = "shared-full"


@dataclass(frozen=True)
class FitResult:
    model: Mixture
    iterations: int
    loglik_trace: np.ndarray
    converged: bool


def init_params(data, k: int, restriction: CovarianceRestriction, seed) -> Mixture:
    """Paper-style initializer.

    Centers are drawn without replacement from the data; each initial
    covariance is spherical with variance min_j ||mu_j - mu_i||^2 / (2n).
    Under the shared restriction the smallest of these variances is used
    for every component.
    """
    data = np.atleast_2d(np.asarray(data, dtype=float))
    m, n = data.shape
    if m < k:
        raise NotEnoughDataError(f"need at least {k} points, got {m}")
    rng = np.random.default_rng(seed)
    centers = data[rng.choice(m, size=k, replace=False)]
    if k == 1:
        # No pairwise distances exist; fall back to the data's mean squared
        # spread so a single component still gets a sane spherical start.
        var = float(np.mean(np.sum((data - data.mean(axis=0)) ** 2, axis=1))) / n
        if var <= 0:
            raise DuplicatePointsError("all points coincide")
        variances = np.array([var])
    else:
        sq = np.sum((centers[:, None, :] - centers[None, :, :]) ** 2, axis=-1)
        np.fill_diagonal(sq, np.inf)
        nearest = sq.min(axis=1)
        if np.any(nearest == 0):
            raise DuplicatePointsError("two initial centers coincide")
        variances = nearest / (2.0 * n)
        if restriction is CovarianceRestriction.SHARED_FULL:
            variances = np.full(k, variances.min())
    comps = [
        Gaussian(mu, var * np.eye(n)) for mu, var in zip(centers, variances)
    ]
    return Mixture(comps, np.full(k, 1.0 / k))


def e_step(model: Mixture, data):
    """Posterior responsibilities and train log-likelihood.

    Row normalization happens in log space so that high-dimensional
    densities cannot underflow to an all-zero row.
    """
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if data.shape[1] != model.dim:
        raise DimensionMismatchError(
            f"data dimension {data.shape[1]} != model dimension {model.dim}"
        )
    log_joint = np.column_stack(
        [
            np.log(w) + log_density_batch(g, data)
            for g, w in zip(model.components, model.weights)
        ]
    )
    lse = logsumexp(log_joint, axis=1)
    resp = np.exp(log_joint - lse[:, None])
    return resp, float(lse.sum())


def m_step(
    resp,
    data,
    restriction: CovarianceRestriction,
    previous: Mixture | None = None,
) -> Mixture:
    """Re-estimate weights, means, and covariances from soft labels.

    An effectively empty component raises EmptyComponentError unless a
    `previous` model is given, in which case the dead component keeps its
    previous parameters and the run continues.
    """
    resp = np.atleast_2d(np.asarray(resp, dtype=float))
    data = np.atleast_2d(np.asarray(data, dtype=float))
    m, k = resp.shape
    if data.shape[0] != m:
        raise ShapeMismatchError("responsibility rows != data rows")
    counts = resp.sum(axis=0)
    dead = np.flatnonzero(counts < EMPTY_COMPONENT_FRACTION * m)
    if dead.size and previous is None:
        raise EmptyComponentError(dead)

    weights = counts / m
    safe_counts = np.where(counts > 0, counts, 1.0)
    means = (resp.T @ data) / safe_counts[:, None]
    comps = []
    if restriction is CovarianceRestriction.SHARED_FULL:
        pooled = np.zeros((data.shape[1], data.shape[1]))
        for i in range(k):
            if i in dead:
                continue
            centered = data - means[i]
            pooled += (resp[:, i][:, None] * centered).T @ centered
        pooled /= m
        pooled = (pooled + pooled.T) / 2.0
        for i in range(k):
            if i in dead:
                comps.append(previous.components[i])
            else:
                comps.append(Gaussian(means[i], pooled))
    else:
        for i in range(k):
            if i in dead:
                comps.append(previous.components[i])
                continue
            centered = data - means[i]
            cov = (resp[:, i][:, None] * centered).T @ centered / counts[i]
            comps.append(Gaussian(means[i], (cov + cov.T) / 2.0))
    for i in dead:
        weights[i] = EMPTY_COMPONENT_FRACTION
        means[i] = previous.components[i].mean
    weights = weights / weights.sum()
    return Mixture(comps, weights)


def _rescue(model: Mixture, data, lse_per_point, dead_index: int) -> Mixture:
    """Move a dead component's center to the lowest-density data point."""
    worst = int(np.argmin(lse_per_point))
    comps = list(model.components)
    old = comps[dead_index]
    comps[dead_index] = Gaussian(data[worst], old.covariance)
    return Mixture(comps, model.weights)


def run_em(
    data,
    k: int,
    restriction: CovarianceRestriction,
    seed,
    tol: float = 1e-5,
    max_iter: int = 500,
) -> FitResult:
    """EM to convergence: stop when the relative log-likelihood gain < tol."""
    data = np.atleast_2d(np.asarray(data, dtype=float))
    model = init_params(data, k, restriction, seed)
    trace = []
    rescues = 0
    converged = False
    iterations = 0
    for _ in range(max_iter + 1):
        try:
            resp, ll = e_step(model, data)
        except (IllConditionedError, NotPositiveDefiniteError) as exc:
            raise type(exc)(f"iteration {iterations}: {exc}") from exc
        trace.append(ll)
        if len(trace) > 1 and abs(ll - trace[-2]) <= tol * abs(ll):
            converged = True
            break
        if iterations == max_iter:
            break
        try:
            model = m_step(resp, data, restriction)
        except EmptyComponentError as exc:
            if rescues < MAX_RESCUES:
                rescues += 1
                log_joint = np.column_stack(
                    [
                        np.log(w) + log_density_batch(g, data)
                        for g, w in zip(model.components, model.weights)
                    ]
                )
                lse = logsumexp(log_joint, axis=1)
                model = _rescue(model, data, lse, exc.indices[0])
            else:
                model = m_step(resp, data, restriction, previous=model)
        except (IllConditionedError, NotPositiveDefiniteError) as exc:
            raise type(exc)(f"iteration {iterations}: {exc}") from exc
        iterations += 1
    return FitResult(
        model=model,
        iterations=iterations,
        loglik_trace=np.array(trace),
        converged=converged,
    )


def rp_em(
    train,
    k: int,
    d: int,
    restriction: CovarianceRestriction,
    seed,
    tol: float = 1e-5,
    max_iter: int = 500,
    extra_high_dim_steps: int = 0,
):
    """Random projection + EM hybrid.

    1. Project the training data into a random d-dimensional subspace.
    2. Run EM to convergence on the projected data.
    3. Apply the final low-dimensional soft labels to the original data,
       giving high-dimensional weights, means, and covariances.
    4. Run one high-dimensional EM step (more only if explicitly asked).

    Returns (high-dimensional FitResult, projection, low-dimensional FitResult).
    """
    train = np.atleast_2d(np.asarray(train, dtype=float))
    n = train.shape[1]
    proj = random_orthonormal(n, d, seed)
    low_data = project_data(proj, train)
    fit_low = run_em(low_data, k, restriction, seed, tol=tol, max_iter=max_iter)
    resp_low, _ = e_step(fit_low.model, low_data)
    model = m_step(resp_low, train, restriction, previous=None)
    trace = []
    steps = 1 + extra_high_dim_steps
    for _ in range(steps):
        resp, ll = e_step(model, train)
        trace.append(ll)
        model = m_step(resp, train, restriction, previous=model)
    _, ll_final = e_step(model, train)
    trace.append(ll_final)
    fit_high = FitResult(
        model=model,
        iterations=steps,
        loglik_trace=np.array(trace),
        converged=False,
    )
    return fit_high, proj, fit_low


def test_loglik(model: Mixture, test) -> float:
    """Log-likelihood of held-out data under the model (0 for no data)."""
    test = np.asarray(test, dtype=float)
    if test.size == 0:
        return 0.0
    _, ll = e_step(model, np.atleast_2d(test))
    return ll


def centers_recovered(model: Mixture, truth: Mixture):
    """Bottleneck-match estimated centers to true ones and score the fit.

    Success requires every matched center to lie within a third of the true
    component's trace-radius. Returns (success, errors in truth order).
    """
    if model.k != truth.k or model.dim != truth.dim:
        raise ShapeMismatchError("mixtures differ in k or dimension")
    k = truth.k
    dists = np.linalg.norm(
        model.means[:, None, :] - truth.means[None, :, :], axis=-1
    )
    best_perm = None
    best_max = np.inf
    for perm in permutations(range(k)):
        worst = max(dists[perm[j], j] for j in range(k))
        if worst < best_max:
            best_max = worst
            best_perm = perm
    errors = np.array([dists[best_perm[j], j] for j in range(k)])
    thresholds = np.array([radius(g) / 3.0 for g in truth.components])
    return bool(np.all(errors <= thresholds)), errors
