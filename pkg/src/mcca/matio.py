"""Matrix file formats shared by the library and the CLI.

Two formats, selected by file suffix (``.csv`` -> CSV, anything else ->
binary) unless forced with ``fmt``:

* CSV: no header, comma separated, plain decimal floats.  ``load_matrix``
  and ``write_matrix`` are literal (cell (i, j) of the file is entry (i, j)
  of the array).  NOTE the orientation convention used by higher layers:
  CSV *data* files store one data point per ROW, and are transposed by
  ``read_points`` into the internal features-by-points layout.

* Binary (bit-exact): magic bytes ``MXB1``, then row and column counts as
  little-endian uint64, then the row-major float64 little-endian payload.
  Binary files always store matrices in the internal orientation.
"""

import struct
from pathlib import Path

import numpy as np

from .errors import DataError

MAGIC = b"MXB1"
_HEADER = struct.Struct("<QQ")


def _format_for(path, fmt):
    if fmt is not None:
        if fmt not in ("csv", "binary"):
            raise DataError(f"unknown matrix format {fmt!r}")
        return fmt
    return "csv" if Path(path).suffix.lower() == ".csv" else "binary"


def load_matrix(path, fmt=None) -> np.ndarray:
    """Read a dense real matrix from ``path``; rejects ragged or non-finite data."""
    fmt = _format_for(path, fmt)
    if fmt == "csv":
        return _load_csv(path)
    return _load_binary(path)


def write_matrix(path, matrix, fmt=None) -> None:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    fmt = _format_for(path, fmt)
    if fmt == "csv":
        _write_csv(path, matrix)
    else:
        _write_binary(path, matrix)


def _load_csv(path):
    rows = []
    width = None
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise DataError(
                    f"{path}: row {lineno} has {len(cells)} columns, expected {width}"
                )
            parsed = []
            for col, cell in enumerate(cells, start=1):
                try:
                    value = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}: cannot parse {cell!r} at row {lineno}, column {col}"
                    ) from None
                if not np.isfinite(value):
                    raise DataError(
                        f"{path}: non-finite value at row {lineno}, column {col}"
                    )
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise DataError(f"{path}: no rows")
    return np.array(rows, dtype=np.float64)


def _write_csv(path, matrix):
    with open(path, "w", encoding="utf-8") as fh:
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def _load_binary(path):
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + _HEADER.size or raw[: len(MAGIC)] != MAGIC:
        raise DataError(f"{path}: not a binary matrix file (bad magic)")
    rows, cols = _HEADER.unpack_from(raw, len(MAGIC))
    if rows == 0 or cols == 0:
        raise DataError(f"{path}: no rows")
    payload = raw[len(MAGIC) + _HEADER.size :]
    expected = rows * cols * 8
    if len(payload) < expected:
        raise DataError(f"{path}: truncated payload ({len(payload)} of {expected} bytes)")
    if len(payload) > expected:
        raise DataError(f"{path}: {len(payload) - expected} trailing bytes after payload")
    matrix = np.frombuffer(payload, dtype="<f8").reshape(rows, cols)
    if not np.all(np.isfinite(matrix)):
        bad = np.argwhere(~np.isfinite(matrix))[0]
        raise DataError(f"{path}: non-finite value at ({bad[0]}, {bad[1]})")
    return matrix.astype(np.float64)


def _write_binary(path, matrix):
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(matrix.shape[0], matrix.shape[1]))
        fh.write(np.ascontiguousarray(matrix, dtype="<f8").tobytes())


def read_points(path, fmt=None) -> np.ndarray:
    """Read a data-point matrix into the internal (features, points) layout.

    CSV files store points as rows and are transposed here; binary files are
    already in the internal orientation.
    """
    matrix = load_matrix(path, fmt=fmt)
    return matrix.T if _format_for(path, fmt) == "csv" else matrix


def write_points(path, matrix, fmt=None) -> None:
    """Inverse of :func:`read_points` for a (features, points) matrix."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    write_matrix(path, matrix.T if _format_for(path, fmt) == "csv" else matrix, fmt=fmt)


def read_labels(path):
    """Read one label per line; returns ints when every label parses as int."""
    with open(path, "r", encoding="utf-8") as fh:
        labels = [line.strip() for line in fh if line.strip()]
    if not labels:
        raise DataError(f"{path}: no rows")
    try:
        return [int(v) for v in labels]
    except ValueError:
        return labels


def write_labels(path, labels) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for label in labels:
            fh.write(f"{label}\n")
