"""Dataset file formats, synthetic data generation, and embedded fixtures.

Two text formats are supported:

* CSV: one sample per line, label first, then the n features,
  e.g. ``+1,3,3``.
* LIBSVM: ``label idx:val ...`` with 1-based indices; missing indices are
  zero.  The feature dimension is the largest index seen in the file.

Labels must parse to exactly +1 or -1; anything else (including 0) is
rejected with the offending line number.  Features are written with 17
significant digits so a write/parse round trip is exact.

The fixtures at the bottom are tiny hand-checkable instances used by the
test suite and the ``counterexample`` CLI command.
"""

from __future__ import annotations

import math
from enum import Enum
from pathlib import Path

import numpy as np

from .certify import PrimalDualPoint
from .problem import Dataset

__all__ = [
    "DataFormat",
    "DataFormatError",
    "parse_dataset",
    "write_csv",
    "gen_synthetic",
    "counterexample_dataset",
    "counterexample_point",
    "COUNTEREXAMPLE_C",
    "single_point_dataset",
    "single_point_point",
    "symmetric_pair_dataset",
    "symmetric_pair_point",
]


class DataFormat(Enum):
    CSV = "csv"
    LIBSVM = "libsvm"


class DataFormatError(ValueError):
    """Malformed dataset file; the message carries the 1-based line number."""


def _parse_label(tok: str, lineno: int) -> float:
    try:
        val = float(tok)
    except ValueError:
        raise DataFormatError(f"line {lineno}: bad label {tok!r}") from None
    if val not in (1.0, -1.0):
        raise DataFormatError(
            f"line {lineno}: label must be +1 or -1, got {tok!r}"
        )
    return val


def _parse_float(tok: str, lineno: int) -> float:
    try:
        val = float(tok)
    except ValueError:
        raise DataFormatError(f"line {lineno}: bad number {tok!r}") from None
    if not math.isfinite(val):
        raise DataFormatError(f"line {lineno}: non-finite value {tok!r}")
    return val


def _parse_csv(lines) -> Dataset:
    xs, ys = [], []
    n = None
    for lineno, line in lines:
        fields = line.split(",")
        if len(fields) < 2:
            raise DataFormatError(
                f"line {lineno}: expected label and at least one feature"
            )
        ys.append(_parse_label(fields[0].strip(), lineno))
        row = [_parse_float(tok.strip(), lineno) for tok in fields[1:]]
        if n is None:
            n = len(row)
        elif len(row) != n:
            raise DataFormatError(
                f"line {lineno}: expected {n} features, got {len(row)}"
            )
        xs.append(row)
    return Dataset(X=np.array(xs), y=np.array(ys))


def _parse_libsvm(lines) -> Dataset:
    rows, ys = [], []
    n = 0
    for lineno, line in lines:
        toks = line.split()
        ys.append(_parse_label(toks[0], lineno))
        entries = {}
        for tok in toks[1:]:
            idx, sep, val = tok.partition(":")
            if not sep:
                raise DataFormatError(
                    f"line {lineno}: expected idx:val, got {tok!r}"
                )
            try:
                i = int(idx)
            except ValueError:
                raise DataFormatError(
                    f"line {lineno}: bad feature index {idx!r}"
                ) from None
            if i < 1:
                raise DataFormatError(
                    f"line {lineno}: feature indices are 1-based, got {i}"
                )
            if i in entries:
                raise DataFormatError(
                    f"line {lineno}: duplicate feature index {i}"
                )
            entries[i] = _parse_float(val, lineno)
            n = max(n, i)
        rows.append(entries)
    if n == 0:
        raise DataFormatError("no feature indices found in file")
    X = np.zeros((len(rows), n))
    for r, entries in enumerate(rows):
        for i, val in entries.items():
            X[r, i - 1] = val
    return Dataset(X=X, y=np.array(ys))


def parse_dataset(path, fmt: DataFormat = DataFormat.CSV) -> Dataset:
    """Load a dataset file; raises DataFormatError with a line number on
    malformed input and on an empty file."""
    text = Path(path).read_text()
    lines = [
        (i, stripped)
        for i, raw in enumerate(text.splitlines(), start=1)
        if (stripped := raw.strip())
    ]
    if not lines:
        raise DataFormatError(f"{path}: no samples found")
    if fmt is DataFormat.CSV:
        return _parse_csv(lines)
    if fmt is DataFormat.LIBSVM:
        return _parse_libsvm(lines)
    raise ValueError(f"unknown format {fmt!r}")


def write_csv(dataset: Dataset, path) -> None:
    """Write CSV with 17-significant-digit features (exact round trip)."""
    out = []
    for x, y in zip(dataset.X, dataset.y):
        feats = ",".join(format(v, ".17g") for v in x)
        out.append(f"{int(y):+d},{feats}")
    Path(path).write_text("\n".join(out) + "\n")


def gen_synthetic(
    n_per_class: int,
    separation: float,
    outlier_fraction: float,
    seed: int,
) -> Dataset:
    """Two unit-variance Gaussian blobs in the plane at +-(separation/2)*e1,
    positives first, with ceil(outlier_fraction * m) points relocated far
    onto the wrong side (10x the separation) while keeping their labels.

    Deterministic for a fixed seed.
    """
    if n_per_class < 1:
        raise ValueError("n_per_class must be at least 1")
    if not 0.0 <= outlier_fraction <= 1.0:
        raise ValueError(
            f"outlier_fraction must be in [0, 1], got {outlier_fraction}"
        )
    rng = np.random.default_rng(seed)
    m = 2 * n_per_class
    half = separation / 2.0
    X = rng.standard_normal((m, 2))
    X[:n_per_class, 0] += half
    X[n_per_class:, 0] -= half
    y = np.concatenate((np.ones(n_per_class), -np.ones(n_per_class)))
    k = math.ceil(outlier_fraction * m)
    if k:
        chosen = rng.choice(m, size=k, replace=False)
        for i in chosen:
            X[i] = rng.standard_normal(2)
            X[i, 0] -= y[i] * 10.0 * separation
    return Dataset(X=X, y=y)


# --- fixtures ---------------------------------------------------------------

#: Penalty at which the three-point counterexample below is a KKT point.
COUNTEREXAMPLE_C = 0.25


def counterexample_dataset() -> Dataset:
    """Three points in the plane admitting a KKT point that fails the prox
    fixed-point condition at every prox step: KKT does not imply
    P-stationarity."""
    return Dataset(
        X=np.array([[3.0, 3.0], [6.0, -2.0], [1.0, 1.0]]),
        y=np.array([1.0, 1.0, -1.0]),
    )


def counterexample_point() -> PrimalDualPoint:
    """The KKT-but-not-P-stationary candidate for counterexample_dataset
    at C = 0.25."""
    return PrimalDualPoint(
        w=np.array([0.5, 0.5]),
        b=-2.0,
        u=np.array([0.0, 1.0, 0.0]),
        lam=np.array([-0.25, 0.0, -0.25]),
    )


def single_point_dataset() -> Dataset:
    """One positive sample at x = 2; global optimum is w = 0, b = 1 with
    objective 0, and every residual vanishes exactly."""
    return Dataset(X=np.array([[2.0]]), y=np.array([1.0]))


def single_point_point() -> PrimalDualPoint:
    return PrimalDualPoint(
        w=np.array([0.0]), b=1.0, u=np.array([0.0]), lam=np.array([0.0])
    )


def symmetric_pair_dataset() -> Dataset:
    """A positive sample at +1 and a negative at -1 on the line; at C = 1
    the point w = 1, b = 0 is stationary with both samples on the margin."""
    return Dataset(X=np.array([[1.0], [-1.0]]), y=np.array([1.0, -1.0]))


def symmetric_pair_point() -> PrimalDualPoint:
    return PrimalDualPoint(
        w=np.array([1.0]),
        b=0.0,
        u=np.array([0.0, 0.0]),
        lam=np.array([-0.5, -0.5]),
    )
