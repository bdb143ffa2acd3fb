"""Radial basis function network classifier for tabular clinical records."""
from .dataset import (
    FeatureMatrix,
    LabelVector,
    PatientRecord,
    Scaler,
    encode,
    encode_features,
    fit_scaler,
    fixture_path,
    parse_csv,
    read_csv,
    transform,
)
from .kmeans import Clustering, kmeans, random_subset_centers
from .rbfnet import (
    KernelConfig,
    RbfModel,
    TrainConfig,
    compute_spreads,
    fit_output_weights,
    forward,
    gaussian_kernel,
    hidden_activations,
    predict,
    predict_proba,
    select_hidden_size,
    train,
)

__version__ = "0.1.0"
