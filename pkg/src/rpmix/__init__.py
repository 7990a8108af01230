"""Random projection for learning mixtures of Gaussians.

A library plus experiment CLI covering: Gaussian/mixture geometry
(separation, eccentricity), random-projection and PCA maps, synthetic
mixture construction, EM with the random-projection hybrid, a per-class
mixture classifier, and a seeded Monte-Carlo experiment harness.
"""

from .classifier import (
    ClassMixtureModel,
    ClusterAnalysis,
    LabeledDataset,
    cluster_analysis,
    evaluate,
    ingest,
    predict,
    save_labeled,
    train,
)
from .em import (
    CovarianceRestriction,
    FitResult,
    centers_recovered,
    e_step,
    init_params,
    m_step,
    rp_em,
    run_em,
    test_loglik,
)
from .errors import RpmixError
from .gaussians import (
    Gaussian,
    Mixture,
    SpectralSummary,
    load_dataset,
    load_mixture,
    log_density,
    mahalanobis,
    mixture_separation,
    norm_tail_bound,
    pairwise_separation,
    radius,
    sample,
    save_dataset,
    save_mixture,
    spectral_summary,
)
from .projection import (
    ProjectionKind,
    ProjectionMatrix,
    load_projection,
    pca,
    project_data,
    project_gaussian,
    project_mixture,
    random_orthonormal,
    random_uniform,
    save_projection,
)
from .synthesis import (
    CovarianceMode,
    MixtureSpec,
    eccentric_covariance,
    make_mixture,
    mixing_weights,
    packed_centers,
)

__version__ = "0.1.0"
