"""Linear dimension-reduction maps: random projections and PCA.

A projection is a d x n matrix applied on the left (x -> A x). The
orthonormal generator draws i.i.d. N(0,1) entries and orthonormalizes the
rows; the cheaper uniform generator draws entries from [-1, 1] and skips
orthonormalization. PCA picks the top variance directions of a dataset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    BadDimsError,
    DegenerateDrawError,
    DimensionMismatchError,
    NotEnoughDataError,
)
from .gaussians import Gaussian, Mixture

ORTHONORMALITY_TOL = 1e-9


class ProjectionKind(Enum):
    ORTHONORMAL_RP = "orthonormal-rp"
    UNIFORM_RP = "uniform-rp"
    PCA = "pca"


@dataclass(frozen=True)
class ProjectionMatrix:
    rows: np.ndarray  # d x n
    kind: ProjectionKind

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2:
            raise BadDimsError("projection rows must form a 2-D matrix")
        d, n = rows.shape
        if d < 1 or d > n:
            raise BadDimsError(f"need 1 <= d <= n, got d={d}, n={n}")
        if self.kind in (ProjectionKind.ORTHONORMAL_RP, ProjectionKind.PCA):
            gram_err = np.max(np.abs(rows @ rows.T - np.eye(d)))
            if gram_err > ORTHONORMALITY_TOL:
                raise BadDimsError(
                    f"rows are not orthonormal (max |AA^T - I| = {gram_err:.3g})"
                )
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def source_dim(self):
        return self.rows.shape[1]

    @property
    def target_dim(self):
        return self.rows.shape[0]


def _modified_gram_schmidt(mat):
    """Orthonormalize rows in place; returns None on a near-zero residual."""
    q = mat.copy()
    d, n = q.shape
    for i in range(d):
        for j in range(i):
            q[i] -= (q[j] @ q[i]) * q[j]
        norm = np.linalg.norm(q[i])
        if norm < 1e-12 * np.sqrt(n):
            return None
        q[i] /= norm
    return q


def random_orthonormal(n: int, d: int, seed) -> ProjectionMatrix:
    """Gaussian-entry matrix with rows orthonormalized by modified Gram-Schmidt."""
    if d < 1 or d > n:
        raise BadDimsError(f"need 1 <= d <= n, got d={d}, n={n}")
    rng = np.random.default_rng(seed)
    for _ in range(3):
        q = _modified_gram_schmidt(rng.standard_normal((d, n)))
        if q is not None:
            return ProjectionMatrix(q, ProjectionKind.ORTHONORMAL_RP)
    raise DegenerateDrawError("Gram-Schmidt hit a near-zero residual three times")


def random_uniform(n: int, d: int, seed) -> ProjectionMatrix:
    """Entries i.i.d. uniform on [-1, 1], scaled by sqrt(3/n).

    The scaling makes E||Av||^2 = d/n for unit v, matching the orthonormal
    generator; no orthonormalization is performed.
    """
    if d < 1 or d > n:
        raise BadDimsError(f"need 1 <= d <= n, got d={d}, n={n}")
    rng = np.random.default_rng(seed)
    entries = rng.uniform(-1.0, 1.0, size=(d, n)) * np.sqrt(3.0 / n)
    return ProjectionMatrix(entries, ProjectionKind.UNIFORM_RP)


def pca(data, d: int) -> ProjectionMatrix:
    """Top-d principal directions of the (centered) data, via SVD.

    Rows are ordered by descending captured variance; each row's first
    nonzero coordinate is made positive so outputs are reproducible.
    """
    data = np.atleast_2d(np.asarray(data, dtype=float))
    m, n = data.shape
    if d < 1 or d > n:
        raise BadDimsError(f"need 1 <= d <= n, got d={d}, n={n}")
    if m < d + 1:
        raise NotEnoughDataError(f"PCA to {d} dims needs at least {d + 1} rows, got {m}")
    centered = data - data.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    rows = vt[:d].copy()
    for row in rows:
        nz = np.flatnonzero(np.abs(row) > 1e-12)
        if nz.size and row[nz[0]] < 0:
            row *= -1.0
    return ProjectionMatrix(rows, ProjectionKind.PCA)


def project_data(p: ProjectionMatrix, data) -> np.ndarray:
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if data.shape[1] != p.source_dim:
        raise DimensionMismatchError(
            f"data dimension {data.shape[1]} != source dimension {p.source_dim}"
        )
    return data @ p.rows.T


def project_gaussian(p: ProjectionMatrix, g: Gaussian) -> Gaussian:
    if g.dim != p.source_dim:
        raise DimensionMismatchError(
            f"Gaussian dimension {g.dim} != source dimension {p.source_dim}"
        )
    return Gaussian(p.rows @ g.mean, p.rows @ g.covariance @ p.rows.T)


def project_mixture(p: ProjectionMatrix, m: Mixture) -> Mixture:
    return Mixture([project_gaussian(p, g) for g in m.components], m.weights)


# ---------------------------------------------------------------------------
# Serialization

def projection_to_dict(p: ProjectionMatrix) -> dict:
    return {
        "kind": p.kind.value,
        "source_dim": p.source_dim,
        "target_dim": p.target_dim,
        "rows": p.rows.tolist(),
    }


def projection_from_dict(doc: dict) -> ProjectionMatrix:
    p = ProjectionMatrix(np.array(doc["rows"], dtype=float), ProjectionKind(doc["kind"]))
    if p.source_dim != doc["source_dim"] or p.target_dim != doc["target_dim"]:
        raise BadDimsError("declared dims do not match the stored matrix")
    return p


def save_projection(p: ProjectionMatrix, path):
    with open(path, "w") as f:
        json.dump(projection_to_dict(p), f)


def load_projection(path) -> ProjectionMatrix:
    with open(path) as f:
        return projection_from_dict(json.load(f))
