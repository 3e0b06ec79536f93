"""Model archives: a directory with JSON metadata and binary matrices.

``mcca.json`` holds the scalars (version, hyperparameters, mixing fractions,
correlations, the init space and centering flag the model was trained with);
``u_###.mxb`` / ``v_###.mxb`` / ``center_x_###.mxb`` / ``center_y_###.mxb``
hold each component's matrices bit-exactly, so reloaded models reproduce
embeddings to the last ulp.
"""

import json
from pathlib import Path

import numpy as np

from .cca import CcaModel
from .covariance import Hyperparameters
from .errors import DataError
from .matio import load_matrix, write_matrix
from .mixture import MccaModel

FORMAT_VERSION = 1
METADATA_FILE = "mcca.json"


def save_model(path, model: MccaModel, init_space: str = "external",
               centered: bool = True) -> None:
    """Write ``model`` under directory ``path`` (created if needed)."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    meta = {
        "format_version": FORMAT_VERSION,
        "r_components": model.r_components,
        "k": model.hyper.k,
        "w_x": model.hyper.w_x,
        "w_y": model.hyper.w_y,
        "seed": model.hyper.seed,
        "pi": [float(p) for p in model.pi],
        "correlations": [[float(c) for c in comp.correlations]
                         for comp in model.components],
        "init_space": init_space,
        "centered": bool(centered),
    }
    (path / METADATA_FILE).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    for r, comp in enumerate(model.components):
        write_matrix(path / f"u_{r:03d}.mxb", comp.u)
        write_matrix(path / f"v_{r:03d}.mxb", comp.v)
        write_matrix(path / f"center_x_{r:03d}.mxb", comp.center_x[:, None])
        write_matrix(path / f"center_y_{r:03d}.mxb", comp.center_y[:, None])


def load_model(path):
    """Read an archive back; returns ``(MccaModel, metadata dict)``."""
    path = Path(path)
    meta_path = path / METADATA_FILE
    if not meta_path.is_file():
        raise DataError(f"{path}: not a model archive ({METADATA_FILE} missing)")
    try:
        meta = json.loads(meta_path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{meta_path}: invalid JSON ({exc})") from None
    if meta.get("format_version") != FORMAT_VERSION:
        raise DataError(
            f"{path}: unsupported archive version {meta.get('format_version')!r}"
        )
    hyper = Hyperparameters(k=meta["k"], r_components=meta["r_components"],
                            w_x=meta["w_x"], w_y=meta["w_y"], seed=meta["seed"])
    components = []
    for r in range(meta["r_components"]):
        u = load_matrix(path / f"u_{r:03d}.mxb")
        v = load_matrix(path / f"v_{r:03d}.mxb")
        center_x = load_matrix(path / f"center_x_{r:03d}.mxb").ravel()
        center_y = load_matrix(path / f"center_y_{r:03d}.mxb").ravel()
        correlations = np.asarray(meta["correlations"][r], dtype=np.float64)
        components.append(CcaModel(u, v, center_x, center_y, correlations, hyper))
    model = MccaModel(tuple(components), np.asarray(meta["pi"], dtype=np.float64), hyper)
    return model, meta
