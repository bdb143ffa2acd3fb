"""Versioned JSON model files.

Floats are written with ``repr`` (via :mod:`json`), which round-trips exactly.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .baselines import LogisticModel, MlpModel
from .dataset import Scaler
from .rbfnet import KernelConfig, RbfModel

FORMAT_VERSION = 1


class UnsupportedFormatError(ValueError):
    pass


def _scaler_dict(s: Scaler | None):
    if s is None:
        return None
    return {"medians": s.medians.tolist(), "iqrs": s.iqrs.tolist()}


def _scaler(d) -> Scaler | None:
    return None if d is None else Scaler(np.array(d["medians"], float), np.array(d["iqrs"], float))


def model_to_dict(model) -> dict:
    if isinstance(model, RbfModel):
        return {
            "format_version": FORMAT_VERSION,
            "model_kind": "rbf",
            "kernel": model.kernel.kind,
            "spread_mode": model.kernel.spread_mode,
            "feature_names": list(model.feature_names),
            "class_names": list(model.class_names),
            "categorical_levels": {k: list(v) for k, v in sorted(model.levels.items())},
            "scaler": _scaler_dict(model.scaler),
            "centers": model.centers.tolist(),
            "spreads": model.spreads.tolist(),
            "weights": model.weights.tolist(),
        }
    common = {
        "format_version": FORMAT_VERSION,
        "feature_names": list(model.feature_names),
        "class_names": list(model.class_names),
        "scaler": _scaler_dict(model.scaler),
    }
    if isinstance(model, LogisticModel):
        return {**common, "model_kind": "logistic", "n_classes": model.n_classes,
                "weights": model.weights.tolist(), "bias": model.bias.tolist()}
    if isinstance(model, MlpModel):
        return {**common, "model_kind": "mlp", "activation": model.activation,
                "hidden_weights": model.hidden_weights.tolist(),
                "output_weights": model.output_weights.tolist()}
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_dict(d: dict):
    version = d.get("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedFormatError(f"unsupported format_version {version!r}; expected {FORMAT_VERSION}")
    kind = d.get("model_kind", "rbf")
    if kind == "rbf":
        return RbfModel(
            centers=np.array(d["centers"], float),
            spreads=np.array(d["spreads"], float),
            weights=np.array(d["weights"], float),
            class_names=tuple(d["class_names"]),
            scaler=_scaler(d["scaler"]),
            kernel=KernelConfig(kind=d["kernel"], spread_mode=d["spread_mode"]),
            feature_names=tuple(d["feature_names"]),
            levels={k: tuple(v) for k, v in d.get("categorical_levels", {}).items()},
        )
    extra = dict(
        class_names=tuple(d["class_names"]),
        feature_names=tuple(d["feature_names"]),
        scaler=_scaler(d["scaler"]),
    )
    if kind == "logistic":
        return LogisticModel(np.array(d["weights"], float), np.array(d["bias"], float), d["n_classes"], **extra)
    if kind == "mlp":
        return MlpModel(np.array(d["hidden_weights"], float), np.array(d["output_weights"], float),
                        d["activation"], **extra)
    raise UnsupportedFormatError(f"unknown model_kind {kind!r}")


def dumps(model) -> str:
    return json.dumps(model_to_dict(model), indent=1, sort_keys=True) + "\n"


def loads(text: str):
    return model_from_dict(json.loads(text))


def save_model(model, path: str | Path) -> None:
    Path(path).write_text(dumps(model), encoding="utf-8")


def load_model(path: str | Path):
    return loads(Path(path).read_text(encoding="utf-8"))
