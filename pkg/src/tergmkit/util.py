"""Shared plumbing: error types, derived RNG streams, atomic file output."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
import zlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np


class TergmkitError(Exception):
    """Base class for package errors."""


class DataError(TergmkitError):
    """Malformed, inconsistent, or out-of-range input data."""


class UnsupportedModelError(TergmkitError):
    """The operation needs an edge-factorized statistic set."""


class NumericalError(TergmkitError):
    """Numerical failure that invalidates the result."""


_U64 = 0xFFFFFFFFFFFFFFFF


def substream(seed, *keys):
    """Independent RNG stream derived from a base seed and a key path.

    Keys may be ints or short strings. The same (seed, keys) pair always
    yields the same generator, independent of call order elsewhere.
    """
    ints = [int(seed) & _U64]
    for k in keys:
        if isinstance(k, str):
            ints.append(zlib.crc32(k.encode("utf-8")))
        else:
            ints.append(int(k) & _U64)
    return np.random.default_rng(np.random.SeedSequence(ints))


def offdiag_mask(n):
    m = np.ones((n, n), dtype=bool)
    np.fill_diagonal(m, False)
    return m


def json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def atomic_write_text(path, text):
    """Write text to path via a temp file and rename, never leaving partials."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_json(path, payload):
    atomic_write_text(path, json.dumps(payload, indent=2, default=json_default) + "\n")


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def parallel_map(fn, items, threads=1):
    """Map preserving input order; uses a thread pool when threads > 1."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
