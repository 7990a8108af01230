"""Digit-style generative classifier: project once, fit a mixture per class.

One random projection is fixed up front; each class then gets its own
shared-covariance mixture fit by EM in the projected space. A point is
assigned to the class owning the single Gaussian that scores it highest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ClassTooSmallError,
    DimensionMismatchError,
    InconsistentWidthError,
    ParseError,
)
from .em import CovarianceRestriction, run_em
from .gaussians import FLOAT_FMT, log_density_batch
from .projection import ProjectionMatrix, project_data, random_orthonormal


@dataclass(frozen=True)
class LabeledDataset:
    points: np.ndarray  # m x n
    labels: np.ndarray  # m integers in [0, num_classes)

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        labels = np.asarray(self.labels, dtype=int)
        if labels.shape != (points.shape[0],):
            raise ValueError("one label per point required")
        if not np.all(np.isfinite(points)):
            raise ValueError("points contain non-finite coordinates")
        if labels.size and labels.min() < 0:
            raise ValueError("labels must be non-negative")
        points.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    @property
    def num_classes(self):
        return int(self.labels.max()) + 1 if self.labels.size else 0

    @property
    def dim(self):
        return self.points.shape[1]


@dataclass(frozen=True)
class ClassMixtureModel:
    projection: ProjectionMatrix
    per_class: tuple  # one Mixture per class, in the projected space
    class_priors: np.ndarray

    def __post_init__(self):
        priors = np.asarray(self.class_priors, dtype=float)
        if abs(priors.sum() - 1.0) > 1e-9:
            raise ValueError("class priors must sum to 1")
        d = self.projection.target_dim
        for mix in self.per_class:
            if mix.dim != d:
                raise DimensionMismatchError(
                    "per-class mixture dimension != projection target dimension"
                )
        priors.setflags(write=False)
        object.__setattr__(self, "per_class", tuple(self.per_class))
        object.__setattr__(self, "class_priors", priors)


def ingest(path) -> LabeledDataset:
    """Read a label-first CSV: each line is `label,x1,...,xn`."""
    points, labels = [], []
    width = None
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            try:
                label = int(fields[0])
                values = [float(v) for v in fields[1:]]
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}") from exc
            if width is None:
                width = len(values)
                if width == 0:
                    raise ParseError(f"line {lineno}: no feature values")
            elif len(values) != width:
                raise InconsistentWidthError(
                    f"line {lineno}: expected {width} values, got {len(values)}"
                )
            labels.append(label)
            points.append(values)
    if not points:
        raise ParseError(f"{path}: no data rows")
    return LabeledDataset(np.array(points), np.array(labels))


def save_labeled(data: LabeledDataset, path):
    """Write the label-first CSV format read by `ingest` (round-trips exactly)."""
    with open(path, "w") as f:
        for label, row in zip(data.labels, data.points):
            f.write(str(int(label)) + "," + ",".join(FLOAT_FMT % v for v in row) + "\n")


def train(
    data: LabeledDataset,
    d: int,
    per_class_k: int = 5,
    seed=0,
    tol: float = 1e-5,
    max_iter: int = 500,
) -> ClassMixtureModel:
    """Fix one random projection, then fit each class independently.

    Each class gets a shared-covariance mixture of `per_class_k` Gaussians
    fit in the projected space; no high-dimensional parameters are kept.
    """
    num_classes = data.num_classes
    proj = random_orthonormal(data.dim, d, seed)
    projected = project_data(proj, data.points)
    mixtures = []
    priors = np.zeros(num_classes)
    for cls in range(num_classes):
        cls_points = projected[data.labels == cls]
        if cls_points.shape[0] < max(per_class_k, 1):
            raise ClassTooSmallError(
                f"class {cls} has {cls_points.shape[0]} points, needs {per_class_k}"
            )
        priors[cls] = cls_points.shape[0] / data.points.shape[0]
        fit = run_em(
            cls_points,
            per_class_k,
            CovarianceRestriction.SHARED_FULL,
            np.random.SeedSequence([int(seed), cls]),
            tol=tol,
            max_iter=max_iter,
        )
        mixtures.append(fit.model)
    return ClassMixtureModel(proj, tuple(mixtures), priors)


def _class_scores(model: ClassMixtureModel, points, use_priors=True):
    """Best per-class Gaussian log-score for every row of `points`."""
    low = project_data(model.projection, points)
    scores = np.empty((low.shape[0], len(model.per_class)))
    for cls, mix in enumerate(model.per_class):
        comp_scores = np.column_stack(
            [
                np.log(w) + log_density_batch(g, low)
                for g, w in zip(mix.components, mix.weights)
            ]
        )
        scores[:, cls] = comp_scores.max(axis=1)
        if use_priors:
            scores[:, cls] += np.log(model.class_priors[cls])
    return scores


def predict_batch(model: ClassMixtureModel, points, use_priors=True) -> np.ndarray:
    """Labels for every row; ties go to the lower class index."""
    scores = _class_scores(model, points, use_priors=use_priors)
    return np.argmax(scores, axis=1)


def predict(model: ClassMixtureModel, x, use_priors=True) -> int:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.projection.source_dim,):
        raise DimensionMismatchError(
            f"point has shape {x.shape}, expected ({model.projection.source_dim},)"
        )
    return int(predict_batch(model, x[None, :], use_priors=use_priors)[0])


def evaluate(model: ClassMixtureModel, test: LabeledDataset, use_priors=True) -> float:
    preds = predict_batch(model, test.points, use_priors=use_priors)
    return float(np.mean(preds == test.labels))


@dataclass(frozen=True)
class ClusterAnalysis:
    separations: np.ndarray  # num_classes x num_classes, zero diagonal
    eccentricities: np.ndarray
    rank_deficient: np.ndarray  # bool per class


def cluster_analysis(
    data: LabeledDataset, projection: ProjectionMatrix | None = None
) -> ClusterAnalysis:
    """Per-class single-Gaussian summary: pairwise separations + eccentricities.

    Covariances are maximum-likelihood (divide by count). Rank-deficient
    classes are flagged and get a pseudo-eccentricity using the smallest
    strictly positive eigenvalue instead of crashing; raw digit-style data
    is expected to be this degenerate.
    """
    points = data.points if projection is None else project_data(projection, data.points)
    num_classes = data.num_classes
    n = points.shape[1]
    means = np.zeros((num_classes, n))
    traces = np.zeros(num_classes)
    eccs = np.zeros(num_classes)
    deficient = np.zeros(num_classes, dtype=bool)
    for cls in range(num_classes):
        cls_points = points[data.labels == cls]
        if cls_points.shape[0] == 0:
            raise ClassTooSmallError(f"class {cls} has no points")
        means[cls] = cls_points.mean(axis=0)
        centered = cls_points - means[cls]
        cov = centered.T @ centered / cls_points.shape[0]
        lam = np.linalg.eigvalsh((cov + cov.T) / 2.0)
        traces[cls] = lam.sum()
        floor = max(lam[-1], 1.0) * np.finfo(float).eps * n
        positive = lam[lam > floor]
        if lam[0] <= floor or cls_points.shape[0] <= n:
            deficient[cls] = True
        eccs[cls] = np.sqrt(lam[-1] / positive[0]) if positive.size else np.inf
    seps = np.zeros((num_classes, num_classes))
    for i in range(num_classes):
        for j in range(i + 1, num_classes):
            sep = np.linalg.norm(means[i] - means[j]) / np.sqrt(
                max(traces[i], traces[j])
            )
            seps[i, j] = seps[j, i] = sep
    return ClusterAnalysis(seps, eccs, deficient)


def save_cluster_analysis(analysis: ClusterAnalysis, path):
    """CSV: class x class separation table with a trailing eccentricity column."""
    k = analysis.separations.shape[0]
    with open(path, "w") as f:
        f.write("class," + ",".join(str(j) for j in range(k)) + ",eccentricity\n")
        for i in range(k):
            row = ",".join(FLOAT_FMT % v for v in analysis.separations[i])
            f.write(f"{i},{row}," + FLOAT_FMT % analysis.eccentricities[i] + "\n")
