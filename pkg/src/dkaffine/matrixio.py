"""Matrix file readers and writers.

Two formats are supported, selected by file suffix:

* ``.mtx`` / ``.mm``: Matrix Market (coordinate or array), via scipy.io.
* ``.csv``: a headerless dense square numeric grid, comma separated.

Writers emit 17 significant decimal digits, which round-trips IEEE doubles
bit-exactly through the matching reader.
"""

from __future__ import annotations

import os

import numpy as np
from scipy import io as scipy_io
from scipy import sparse

MM_SUFFIXES = (".mtx", ".mm")
CSV_SUFFIXES = (".csv",)


def _suffix(path) -> str:
    return os.path.splitext(str(path))[1].lower()


def read_matrix(path) -> np.ndarray:
    """Read a dense square matrix from a Matrix Market or CSV file."""
    suffix = _suffix(path)
    if suffix in MM_SUFFIXES:
        m = scipy_io.mmread(str(path))
        if sparse.issparse(m):
            m = m.toarray()
        a = np.asarray(m, dtype=np.float64)
    elif suffix in CSV_SUFFIXES:
        a = np.loadtxt(str(path), delimiter=",", dtype=np.float64, ndmin=2)
    else:
        raise ValueError(f"unsupported matrix file suffix {suffix!r} (use .mtx, .mm or .csv)")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{path}: expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{path}: matrix contains non-finite entries")
    return a


def write_matrix(path, m) -> None:
    """Write a dense square matrix; format chosen by the file suffix."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    suffix = _suffix(path)
    if suffix in MM_SUFFIXES:
        # precision=17 significant digits: exact decimal round-trip.  Write
        # through a handle: with a filename the writer appends ".mtx" to any
        # other suffix instead of honoring it.
        with open(path, "wb") as handle:
            scipy_io.mmwrite(handle, a, precision=17)
    elif suffix in CSV_SUFFIXES:
        np.savetxt(str(path), a, delimiter=",", fmt="%.17g")
    else:
        raise ValueError(f"unsupported matrix file suffix {suffix!r} (use .mtx, .mm or .csv)")
