"""Covariance families: Matern, Bessel potentials, Schoenberg and Berg-Porcu mixtures."""

from .base import (
    Constant,
    CovarianceModel,
    PDCheck,
    ProductSpace,
    SchurProduct,
    check_positive_definite,
    covariance_matrix,
    product_space,
    schur_product,
)
from .matern import (
    Matern,
    MaternParams,
    bessel_potential_kernel,
    matern_correlation,
    matern_covariance,
    matern_spectral_density,
    matern_variance_spde,
    spectral_to_correlation,
    stein_integral_oracle,
)
from .serialize import dump_model, dumps_model, load_model, loads_model, model_from_dict, model_to_dict
from .sphere import (
    CharFunction,
    GeoTemporalModel,
    SchoenbergSeries,
    berg_porcu_eval,
    geodesic_distance,
    schoenberg_eval,
)

__all__ = [
    "CharFunction",
    "Constant",
    "CovarianceModel",
    "GeoTemporalModel",
    "Matern",
    "MaternParams",
    "PDCheck",
    "ProductSpace",
    "SchoenbergSeries",
    "SchurProduct",
    "berg_porcu_eval",
    "bessel_potential_kernel",
    "check_positive_definite",
    "covariance_matrix",
    "dump_model",
    "dumps_model",
    "geodesic_distance",
    "load_model",
    "loads_model",
    "matern_correlation",
    "matern_covariance",
    "matern_spectral_density",
    "matern_variance_spde",
    "model_from_dict",
    "model_to_dict",
    "product_space",
    "schoenberg_eval",
    "schur_product",
    "spectral_to_correlation",
    "stein_integral_oracle",
]
