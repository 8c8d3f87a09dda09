"""Categorical datasets and contingency tables.

Datasets are read from plain comma separated files: UTF-8, an optional header row,
no quoting or escaping (cells may not contain commas). Lines starting with `#`
are comments. Every cell is a category label; labels are coded 0..k-1 per column
in order of first appearance.
"""

from __future__ import annotations

import logging
import math
import os

from dataclasses import dataclass, field
from pathlib import Path
from typing import (
    Iterable,
    List,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np
import pandas as pd

from mecip.commons import public


logger = logging.getLogger(__name__)

# above this many cells a table is built over observed strata only
DENSE_TABLE_LIMIT = 1 << 22


class DatasetFormatError(ValueError):
    pass


@public()
@dataclass(frozen=True, eq=False)
class CategoricalDataset:
    """N x V table of category codes.

    `rows[i, v]` is the code of variable `v` in record `i`, always in `[0, cardinalities[v])`.
    `labels[v][c]` is the original text of code `c`, when the dataset was read from text.
    """

    names: Tuple[str, ...]
    cardinalities: Tuple[int, ...]
    rows: np.ndarray
    labels: Optional[Tuple[Tuple[str, ...], ...]] = field(default=None, repr=False)

    def __post_init__(self):
        names = tuple(self.names)
        cards = tuple(int(c) for c in self.cardinalities)
        rows = np.array(self.rows, dtype=np.int64, copy=True)

        if rows.ndim != 2:
            raise ValueError(f"Dataset rows must be a 2-d table, got shape {rows.shape}")
        if rows.shape[0] < 1:
            raise ValueError("Dataset must have at least one row")
        if not (rows.shape[1] == len(names) == len(cards)):
            raise ValueError(
                f"Column count mismatch: {rows.shape[1]} columns, {len(names)} names, {len(cards)} cardinalities")
        if any(not n for n in names):
            raise ValueError("Variable names must be non-empty")
        if len(set(names)) != len(names):
            raise ValueError(f"Variable names must be unique, got {list(names)}")
        if any(c < 1 for c in cards):
            raise ValueError(f"Cardinalities must be positive, got {list(cards)}")
        if rows.size and (rows.min() < 0 or np.any(rows >= np.asarray(cards, dtype=np.int64))):
            bad = int(np.argmax(np.any((rows < 0) | (rows >= np.asarray(cards)), axis=0)))
            raise ValueError(f"Codes of column {names[bad]!r} are outside [0, {cards[bad]})")

        labels = self.labels
        if labels is not None:
            labels = tuple(tuple(str(x) for x in col) for col in labels)
            if len(labels) != len(cards) or any(len(l) != c for l, c in zip(labels, cards)):
                raise ValueError("Label map does not match cardinalities")

        rows.setflags(write=False)
        object.__setattr__(self, 'names', names)
        object.__setattr__(self, 'cardinalities', cards)
        object.__setattr__(self, 'rows', rows)
        object.__setattr__(self, 'labels', labels)

    @classmethod
    def from_codes(
        cls,
        rows: Sequence[Sequence[int]],
        cardinalities: Optional[Sequence[int]] = None,
        names: Optional[Sequence[str]] = None,
    ) -> CategoricalDataset:
        """Wraps integer codes; cardinalities default to `max code + 1` per column."""
        array = np.asarray(rows, dtype=np.int64)
        if array.ndim != 2:
            raise ValueError(f"Dataset rows must be a 2-d table, got shape {array.shape}")
        if cardinalities is None:
            cardinalities = [int(c) + 1 for c in array.max(axis=0)] if array.size else []
        if names is None:
            names = default_names(array.shape[1])
        return cls(tuple(names), tuple(cardinalities), array)

    @property
    def n_rows(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_vars(self) -> int:
        return len(self.names)

    def column(self, v: int) -> np.ndarray:
        return self.rows[:, v]

    def decoded(self) -> List[List[str]]:
        """Rows translated back into the original labels."""
        if self.labels is None:
            return [[str(c) for c in row] for row in self.rows.tolist()]
        return [
            [self.labels[v][c] for v, c in enumerate(row)]
            for row in self.rows.tolist()
        ]


def default_names(n: int) -> Tuple[str, ...]:
    return tuple(f"X{i}" for i in range(n))


def _data_lines(text: str) -> Iterable[Tuple[int, List[str]]]:
    """Non-blank lines split into cells; `#` comments are only allowed before the first row."""
    leading = True
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or (leading and stripped.startswith("#")):
            continue
        leading = False
        yield lineno, [cell.strip() for cell in stripped.split(",")]


@public()
def load_csv(path: os.PathLike, header: bool = True) -> CategoricalDataset:
    """Reads a categorical dataset from a comma separated file."""

    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = list(_data_lines(text))
    if not lines:
        raise DatasetFormatError(f"{path}: file is empty")

    if header:
        header_lineno, names = lines[0]
        lines = lines[1:]
        if any(not n for n in names):
            raise DatasetFormatError(f"{path}:{header_lineno}: empty variable name in header")
        duplicated = sorted({n for n in names if names.count(n) > 1})
        if duplicated:
            raise DatasetFormatError(f"{path}:{header_lineno}: duplicated header names {duplicated}")
        if not lines:
            raise DatasetFormatError(f"{path}: no data rows after the header")
        width = len(names)
    else:
        width = len(lines[0][1])
        names = list(default_names(width))

    for lineno, cells in lines:
        if len(cells) != width:
            raise DatasetFormatError(f"{path}:{lineno}: expected {width} cells, got {len(cells)}")
        if any(c == "" for c in cells):
            raise DatasetFormatError(f"{path}:{lineno}: missing value (empty cell)")

    frame = pd.DataFrame([cells for _, cells in lines], columns=range(width), dtype=str)
    codes = np.empty(frame.shape, dtype=np.int64)
    labels = []
    for v in range(width):
        column_codes, uniques = pd.factorize(frame[v], sort=False)
        codes[:, v] = column_codes
        labels.append(tuple(str(u) for u in uniques))

    ds = CategoricalDataset(
        names=tuple(names),
        cardinalities=tuple(len(l) for l in labels),
        rows=codes,
        labels=tuple(labels),
    )
    logger.info("Loaded %s: %d rows, %d variables", path, ds.n_rows, ds.n_vars)
    return ds


@public()
def write_csv(
    ds: CategoricalDataset,
    path: os.PathLike,
    header: bool = True,
    comments: str = "",
) -> None:
    """Writes the dataset as labels; `comments` is a ready-made block of `#` lines."""

    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(comments)
        if header:
            f.write(",".join(ds.names) + "\n")
        for row in ds.decoded():
            f.write(",".join(row) + "\n")
    logger.info("Wrote %d rows into %s", ds.n_rows, path)


@public()
@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Counts of a variable pair, one `r x c` slice per stratum of the conditioning set.

    `counts[s, i, j]` is the number of rows in stratum `s` with the first variable at `i`
    and the second at `j`. Strata follow mixed-radix order over the conditioning variables
    sorted by index (first variable most significant). `n_strata` is the product of their
    cardinalities; when that is too large to materialize the table holds observed strata
    only, still in the same relative order, and `dense` is false.
    """

    counts: np.ndarray
    n_strata: int
    dense: bool = True

    @property
    def dims(self) -> Tuple[int, int]:
        return int(self.counts.shape[1]), int(self.counts.shape[2])

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@public()
def contingency(
    ds: CategoricalDataset,
    a: int,
    b: int,
    cond: Iterable[int] = (),
) -> ContingencyTable:
    """Counts of `(a, b)` per configuration of `cond`."""

    cond = tuple(sorted(set(cond)))
    n = ds.n_vars
    for v in (a, b, *cond):
        if not 0 <= v < n:
            raise ValueError(f"Variable index {v} out of range [0, {n})")
    if a == b:
        raise ValueError(f"Tested variables must differ, got {a} twice")
    if a in cond or b in cond:
        raise ValueError(f"Tested pair ({a}, {b}) overlaps the conditioning set {list(cond)}")

    r, c = ds.cardinalities[a], ds.cardinalities[b]
    cell = ds.rows[:, a] * c + ds.rows[:, b]
    q = math.prod(ds.cardinalities[v] for v in cond)

    if q * r * c <= DENSE_TABLE_LIMIT:
        if cond:
            strata = np.ravel_multi_index(
                tuple(ds.rows[:, v] for v in cond),
                tuple(ds.cardinalities[v] for v in cond),
            )
        else:
            strata = np.zeros(ds.n_rows, dtype=np.int64)
        counts = np.bincount(strata * (r * c) + cell, minlength=q * r * c).reshape(q, r, c)
        return ContingencyTable(counts=counts, n_strata=q)

    _, strata = np.unique(ds.rows[:, list(cond)], axis=0, return_inverse=True)
    strata = strata.ravel()
    observed = int(strata.max()) + 1
    counts = np.bincount(strata * (r * c) + cell, minlength=observed * r * c).reshape(observed, r, c)
    logger.debug("Sparse table for (%d, %d | %s): %d of %d strata observed", a, b, cond, observed, q)
    return ContingencyTable(counts=counts, n_strata=q, dense=False)
