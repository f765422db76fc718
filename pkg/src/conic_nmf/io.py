"""File formats: dense CSV, MatrixMarket, label files, key-value configs and
JSON reports.
"""
import json
import os

import numpy as np
import scipy.io
import scipy.sparse

from .errors import InputError, NegativeEntries

__all__ = [
    "read_matrix",
    "write_matrix",
    "read_labels",
    "write_labels",
    "read_config",
    "write_config",
    "write_json",
    "read_json",
    "parse_list",
    "parse_bool",
]


def write_matrix(path, M):
    """Write a dense matrix as headerless CSV with 17 significant digits.

    A matrix with no columns or no rows produces an empty file.
    """
    M = np.asarray(M, dtype=np.float64)
    with open(path, "w") as fh:
        if M.size:
            np.savetxt(fh, M, fmt="%.17g", delimiter=",")


def read_matrix(path, nonnegative=True):
    """Read a dense CSV or a MatrixMarket (``.mtx``) file into a float array.

    Parameters
    ----------
    path : str
    nonnegative : bool
        Reject negative entries.

    Raises
    ------
    InputError
        If the file cannot be read or holds non-finite values.
    NegativeEntries
        If ``nonnegative`` and some entry is negative.
    """
    try:
        if str(path).endswith((".mtx", ".mtx.gz")):
            M = scipy.io.mmread(path)
            M = M.toarray() if scipy.sparse.issparse(M) else np.asarray(M)
            M = M.astype(np.float64)
        elif os.path.getsize(path) == 0:
            M = np.zeros((0, 0))
        else:
            M = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read matrix from {path}: {exc}") from exc
    if not np.all(np.isfinite(M)):
        raise InputError(f"{path} contains non-finite entries")
    if nonnegative and np.any(M < 0):
        raise NegativeEntries(f"{path} contains negative entries")
    return M


def write_mtx(path, M):
    """Write a matrix in MatrixMarket coordinate format."""
    scipy.io.mmwrite(path, scipy.sparse.coo_matrix(np.asarray(M, dtype=np.float64)),
                     precision=17)


def write_labels(path, labels):
    """One integer per line."""
    with open(path, "w") as fh:
        for x in np.asarray(labels, dtype=np.int64):
            fh.write(f"{x}\n")


def read_labels(path):
    with open(path) as fh:
        return np.array([int(line) for line in fh if line.strip()], dtype=np.int64)


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Returns a dict of raw string values.
    """
    out = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def write_config(path, mapping):
    with open(path, "w") as fh:
        for key, value in mapping.items():
            if isinstance(value, (list, tuple, np.ndarray)):
                value = ",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in value)
            fh.write(f"{key} = {value}\n")


def parse_list(value, cast=float):
    """Split a comma-separated string into a list of ``cast`` values."""
    if isinstance(value, (list, tuple)):
        return [cast(v) for v in value]
    value = str(value).strip()
    if not value:
        return []
    try:
        return [cast(v.strip()) for v in value.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"cannot parse list {value!r}: {exc}") from exc


def parse_bool(value):
    if isinstance(value, bool):
        return value
    v = str(value).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise InputError(f"cannot parse boolean {value!r}")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.generic):
        return _jsonable(x.item())
    if isinstance(x, float) and not np.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def write_json(path, obj):
    """Write ``obj`` as strict JSON; numpy values are converted and
    non-finite floats become the strings ``"inf"``, ``"-inf"``, ``"nan"``.
    """
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True)
    if path is None or path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def dumps_json(obj):
    return json.dumps(_jsonable(obj), sort_keys=True)
