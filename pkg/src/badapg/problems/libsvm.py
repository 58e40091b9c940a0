"""Reader and writer for the LIBSVM sparse text format.

Each non-blank line reads ``label index:value index:value ...`` with 1-based,
strictly increasing indices.  Text after ``#`` is ignored.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse as sp

from ..errors import ParseError

__all__ = ["read_libsvm", "write_libsvm", "parse_libsvm_lines"]


def _number(token, lineno, what):
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"non-numeric {what} {token!r}", line=lineno) from None


def parse_libsvm_lines(lines, n_features=None, sparse=False):
    """Parse an iterable of text lines; see `read_libsvm`."""
    labels = []
    rows, cols, vals = [], [], []
    max_index = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        labels.append(_number(tokens[0], lineno, "label"))
        row = len(labels) - 1
        last = 0
        for tok in tokens[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise ParseError(f"expected index:value, got {tok!r}", line=lineno)
            try:
                idx = int(idx_s)
            except ValueError:
                raise ParseError(f"non-integer index {idx_s!r}", line=lineno) from None
            if idx < 1:
                raise ParseError(f"indices are 1-based, got {idx}", line=lineno)
            if idx <= last:
                raise ParseError(f"index {idx} does not increase (previous {last})", line=lineno)
            last = idx
            rows.append(row)
            cols.append(idx - 1)
            vals.append(_number(val_s, lineno, "value"))
        max_index = max(max_index, last)
    n_samples = len(labels)
    if n_features is None:
        n_features = max_index
    elif max_index > n_features:
        raise ParseError(f"index {max_index} exceeds n_features={n_features}")
    shape = (n_samples, n_features)
    X = sp.csr_matrix((vals, (rows, cols)), shape=shape, dtype=float)
    return (X if sparse else X.toarray()), np.asarray(labels, dtype=float)


def read_libsvm(path, n_features=None, sparse=False):
    """Read a LIBSVM file into ``(X, y)`` with samples as rows of `X`.

    `X` is a dense array unless ``sparse=True`` (CSR).  An empty file gives
    a ``0 x 0`` matrix.  Malformed content raises `ParseError` carrying the
    offending line number; unreadable files raise `OSError`.
    """
    with open(path, "r", encoding="utf-8") as fh:
        return parse_libsvm_lines(fh, n_features=n_features, sparse=sparse)


def write_libsvm(path, X, y):
    """Write ``(X, y)`` in LIBSVM format, skipping zero entries."""
    X = sp.csr_matrix(X)
    y = np.asarray(y, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(X.shape[0]):
            start, end = X.indptr[i], X.indptr[i + 1]
            order = np.argsort(X.indices[start:end])
            idx = X.indices[start:end][order]
            val = X.data[start:end][order]
            items = " ".join(f"{j + 1}:{float(v)!r}" for j, v in zip(idx, val) if v != 0)
            fh.write(f"{float(y[i])!r} {items}".rstrip() + "\n")
