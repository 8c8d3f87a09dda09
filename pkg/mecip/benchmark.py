"""Replicated benchmark runs and their aggregation.

A benchmark spec lists one cell per line::

    # network-or-tuple   sample-size   algorithms
    networks/asia.bif    10000         mecip,hc
    20,2,2,1             1000          mecip

Replicate `r` of a cell uses seed `base_seed + r` for both the synthetic network
(tuples draw a fresh network per replicate) and the sampled dataset. Records are
appended to the CSV as soon as they are produced, so an interrupted run leaves a
readable file. Timing covers the learn call only.
"""

from __future__ import annotations

import csv
import functools
import logging
import os
import re
import time

from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import (
    Iterable,
    List,
    Optional,
    Sequence,
    Tuple,
)

import pandas as pd

from mecip.commons import format_mean_std, public
from mecip.network import (
    MAX_BENCHMARK_STRENGTH,
    DiscreteBayesNet,
    SyntheticSpec,
    forward_sample,
    gen_random_net,
    read_bif,
)
from mecip.pipeline import ALGORITHMS, LearnConfig, structural_metrics
from mecip.reference import network_key, published


logger = logging.getLogger(__name__)

CSV_COLUMNS = ("network", "n", "algorithm", "seed", "missing_pct", "extra_pct", "seconds")
GROUPINGS = ("cell", "indegree", "samples")

_TUPLE_RE = re.compile(r"\(?\s*\d+\s*,\s*\d+\s*,\s*\d+\s*,\s*\d+\s*\)?")
_LABEL_RE = re.compile(r"\((\d+), (\d+), (\d+), (\d+)\)")


@public()
@dataclass(frozen=True)
class BenchmarkRecord:
    network: str
    n: int
    algorithm: str
    seed: int
    missing_pct: float
    extra_pct: float
    seconds: float

    def __post_init__(self):
        if self.seconds < 0:
            raise ValueError(f"Elapsed time must be non-negative, got {self.seconds}")
        if not 0 <= self.missing_pct <= 1:
            raise ValueError(f"Missing fraction must be in [0, 1], got {self.missing_pct}")
        if self.extra_pct < 0:
            raise ValueError(f"Extra fraction must be non-negative, got {self.extra_pct}")

    def to_csv_row(self) -> List[str]:
        return [str(x) for x in astuple(self)]


@public()
@dataclass(frozen=True)
class BenchmarkCell:
    """One line of a benchmark spec: a BIF path or synthetic tuple, a sample size and algorithms."""

    source: str
    n: int
    algorithms: Tuple[str, ...]

    @property
    def synthetic(self) -> Optional[SyntheticSpec]:
        if _TUPLE_RE.fullmatch(self.source):
            return SyntheticSpec.parse(self.source)
        return None

    @property
    def label(self) -> str:
        spec = self.synthetic
        return spec.label if spec is not None else network_key(self.source)

    def network(self, seed: int) -> DiscreteBayesNet:
        spec = self.synthetic
        if spec is None:
            return _read_network(self.source)
        return gen_random_net(SyntheticSpec(spec.n_nodes, spec.max_in_degree, spec.max_states, spec.strength, seed))


@functools.lru_cache(maxsize=None)
def _read_network(path: str) -> DiscreteBayesNet:
    return read_bif(path)


@public()
def parse_benchmark_spec(text: str, base_dir: Optional[os.PathLike] = None) -> List[BenchmarkCell]:
    """Parses spec lines; relative BIF paths are resolved against `base_dir` when given."""
    cells = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"benchmark spec line {lineno}: expected '<network|tuple> <n> <algo[,algo]>', got {line!r}")
        source, n, algorithms = parts
        if not n.isdigit() or int(n) < 1:
            raise ValueError(f"benchmark spec line {lineno}: sample size must be a positive integer, got {n!r}")
        algos = tuple(a for a in algorithms.split(",") if a)
        unknown = [a for a in algos if a not in ALGORITHMS]
        if unknown or not algos:
            raise ValueError(
                f"benchmark spec line {lineno}: unknown algorithms {unknown}, expected some of {sorted(ALGORITHMS)}")
        if base_dir is not None and not _TUPLE_RE.fullmatch(source) and not os.path.isabs(source):
            source = str(Path(base_dir) / source)
        cell = BenchmarkCell(source, int(n), algos)
        spec = cell.synthetic
        if spec is not None and spec.strength > MAX_BENCHMARK_STRENGTH:
            raise ValueError(f"benchmark spec line {lineno}: strength must be in 1..{MAX_BENCHMARK_STRENGTH}")
        cells.append(cell)
    if not cells:
        raise ValueError("benchmark spec has no cells")
    return cells


class RecordWriter:
    """Appends records to a CSV file, flushing after every record."""

    def __init__(self, path: os.PathLike, comments: str = ""):
        self.path = Path(path)
        fresh = not self.path.exists() or self.path.stat().st_size == 0
        self._file = open(self.path, "a", encoding="utf-8", newline="")
        self._writer = csv.writer(self._file, lineterminator="\n")
        if fresh:
            self._file.write(comments)
            self._writer.writerow(CSV_COLUMNS)
            self._file.flush()

    def append(self, record: BenchmarkRecord) -> None:
        self._writer.writerow(record.to_csv_row())
        self._file.flush()
        os.fsync(self._file.fileno())

    def close(self) -> None:
        self._file.close()

    def __enter__(self) -> RecordWriter:
        return self

    def __exit__(self, *exc) -> None:
        self.close()


@public()
def run_replicate(cell: BenchmarkCell, algorithm: str, seed: int, cfg: LearnConfig) -> BenchmarkRecord:
    net = cell.network(seed)
    ds = forward_sample(net, cell.n, seed)
    learn = ALGORITHMS[algorithm]
    start = time.perf_counter()
    result = learn(ds, cfg.replace(seed=seed))
    seconds = time.perf_counter() - start
    metrics = structural_metrics(net, result.cpdag)
    return BenchmarkRecord(
        network=cell.label,
        n=cell.n,
        algorithm=algorithm,
        seed=seed,
        missing_pct=metrics.missing_pct,
        extra_pct=metrics.extra_pct,
        seconds=seconds,
    )


@public()
def run_benchmark(
    cells: Sequence[BenchmarkCell],
    replicates: int,
    base_seed: int,
    out: os.PathLike,
    cfg: LearnConfig,
    workers: int = 1,
    comments: str = "",
) -> List[BenchmarkRecord]:
    """Runs every cell `replicates` times; records land in `out` in completion order."""

    if replicates < 1:
        raise ValueError(f"Number of replicates must be positive, got {replicates}")
    jobs = [
        (cell, algorithm, base_seed + r)
        for cell in cells
        for r in range(replicates)
        for algorithm in cell.algorithms
    ]
    logger.info("Benchmark: %d cells, %d replicates, %d runs", len(cells), replicates, len(jobs))

    records = []
    with RecordWriter(out, comments) as writer:

        def collect(record: BenchmarkRecord) -> None:
            writer.append(record)
            records.append(record)
            logger.info("[%d/%d] %s n=%d %s seed=%d: missing %.3f extra %.3f %.2fs",
                        len(records), len(jobs), record.network, record.n, record.algorithm,
                        record.seed, record.missing_pct, record.extra_pct, record.seconds,
                        extra={'incomplete_line': len(records) < len(jobs)})

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(run_replicate, cell, algorithm, seed, cfg) for cell, algorithm, seed in jobs]
                for future in as_completed(futures):
                    collect(future.result())
        else:
            for cell, algorithm, seed in jobs:
                collect(run_replicate(cell, algorithm, seed, cfg))

    return records


@public()
def read_records(path: os.PathLike) -> pd.DataFrame:
    return pd.read_csv(path, comment="#", dtype={"network": str, "algorithm": str})


def records_frame(records: Iterable[BenchmarkRecord]) -> pd.DataFrame:
    return pd.DataFrame([astuple(r) for r in records], columns=[f.name for f in fields(BenchmarkRecord)])


_METRICS = (("missing", "missing_pct"), ("extra", "extra_pct"), ("seconds", "seconds"))


@public()
def aggregate(records: pd.DataFrame, by: Sequence[str] = ("network", "n", "algorithm")) -> pd.DataFrame:
    """Mean and sample standard deviation per group, plus 'mean (std)' text columns."""

    spec = {"runs": ("seed", "size")}
    for name, column in _METRICS:
        spec[f"{name}_mean"] = (column, "mean")
        spec[f"{name}_std"] = (column, "std")
    table = records.groupby(list(by), sort=True).agg(**spec).reset_index()
    for name, _ in _METRICS:
        table[name] = [format_mean_std(m, s) for m, s in zip(table[f"{name}_mean"], table[f"{name}_std"])]
    if "network" in by and "n" in by and "algorithm" in by:
        table["published"] = [
            _published_text(row.network, row.n, row.algorithm)
            for row in table.itertuples(index=False)
        ]
    return table


def _published_text(network: str, n: int, algorithm: str) -> str:
    ref = published(network, n, algorithm)
    if ref is None:
        return ""
    return f"{format_mean_std(*ref.missing)} / {format_mean_std(*ref.extra)}"


def synthetic_parameters(records: pd.DataFrame) -> pd.DataFrame:
    """Records of synthetic networks with the tuple split into columns."""
    parsed = records["network"].str.extract(_LABEL_RE)
    parsed.columns = ["nodes", "max_in_degree", "max_states", "strength"]
    keep = parsed.notna().all(axis=1)
    return pd.concat([records[keep], parsed[keep].astype(int)], axis=1)


@public()
def grouped_table(records: pd.DataFrame, group_by: str = "cell") -> pd.DataFrame:
    """Aggregate by benchmark cell, by synthetic maximum in-degree or by sample size.

    The in-degree and sample-size groupings give the per-algorithm distributions
    behind box plots (quartiles next to mean and std).
    """

    if group_by not in GROUPINGS:
        raise ValueError(f"Unknown grouping {group_by!r}, expected one of {GROUPINGS}")
    if group_by == "cell":
        return aggregate(records)

    if group_by == "indegree":
        frame, keys = synthetic_parameters(records), ["algorithm", "max_in_degree"]
    else:
        frame, keys = records, ["algorithm", "n"]
    if frame.empty:
        raise ValueError(f"No records to group by {group_by}")

    table = aggregate(frame, by=keys)
    for name, column in _METRICS[:2]:
        quartiles = frame.groupby(keys, sort=True)[column].quantile([0.25, 0.5, 0.75]).unstack()
        quartiles.columns = [f"{name}_q1", f"{name}_median", f"{name}_q3"]
        table = table.merge(quartiles.reset_index(), on=keys)
    return table
