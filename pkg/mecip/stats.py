"""Chi-square independence tests and decomposable BIC scores."""

from __future__ import annotations

import logging
import math
import threading

from dataclasses import dataclass
from typing import (
    Dict,
    Iterable,
    Optional,
    Tuple,
)

import numpy as np
from scipy.special import gammaincc, xlogy

from mecip.commons import public
from mecip.data import CategoricalDataset, ContingencyTable, DENSE_TABLE_LIMIT
from mecip.graph import CyclicGraphError, PartiallyDirectedGraph, find_cycle


logger = logging.getLogger(__name__)


@public()
@dataclass(frozen=True)
class ChiSqResult:
    statistic: float
    dof: int
    p_value: float


@public()
@dataclass(frozen=True)
class LocalScore:
    node: int
    parents: Tuple[int, ...]
    value: float


@public()
def chi_sq_pvalue(x: float, dof: int) -> float:
    """Upper tail of the chi-square distribution, `Q(dof / 2, x / 2)`."""
    if x < 0:
        raise ValueError(f"Chi-square statistic must be non-negative, got {x}")
    if dof < 1:
        raise ValueError(f"Degrees of freedom must be at least 1, got {dof}")
    if x == 0:
        return 1.0
    return float(gammaincc(dof / 2.0, x / 2.0))


@public()
def chi_sq_test(table: ContingencyTable) -> ChiSqResult:
    """Pearson chi-square test of independence, summed over strata.

    Expected counts are computed per stratum. Rows and columns that are empty within
    a stratum do not contribute degrees of freedom; no continuity correction is applied.
    """

    counts = table.counts.astype(np.float64)
    row = counts.sum(axis=2)
    col = counts.sum(axis=1)
    total = counts.sum(axis=(1, 2))

    with np.errstate(divide='ignore', invalid='ignore'):
        expected = row[:, :, None] * col[:, None, :] / total[:, None, None]
    mask = expected > 0
    deviation = counts[mask] - expected[mask]
    statistic = float(np.sum(deviation * deviation / expected[mask]))

    nonzero_rows = (row > 0).sum(axis=1)
    nonzero_cols = (col > 0).sum(axis=1)
    per_stratum = np.where(total > 0, (nonzero_rows - 1) * (nonzero_cols - 1), 0)
    dof = int(np.clip(per_stratum, 0, None).sum())

    if dof <= 0:
        return ChiSqResult(statistic=0.0, dof=0, p_value=1.0)
    p_value = min(1.0, max(0.0, chi_sq_pvalue(statistic, dof)))
    return ChiSqResult(statistic=statistic, dof=dof, p_value=p_value)


def _family_counts(ds: CategoricalDataset, node: int, parents: Tuple[int, ...]) -> Tuple[np.ndarray, np.ndarray]:
    r = ds.cardinalities[node]
    child = ds.rows[:, node]
    if not parents:
        joint = np.bincount(child, minlength=r)
        return joint, np.array([ds.n_rows])

    q = math.prod(ds.cardinalities[p] for p in parents)
    if q * r <= DENSE_TABLE_LIMIT:
        config = np.ravel_multi_index(
            tuple(ds.rows[:, p] for p in parents),
            tuple(ds.cardinalities[p] for p in parents),
        )
        observed = q
    else:
        _, config = np.unique(ds.rows[:, list(parents)], axis=0, return_inverse=True)
        config = config.ravel()
        observed = int(config.max()) + 1

    joint = np.bincount(config * r + child, minlength=observed * r)
    return joint, joint.reshape(observed, r).sum(axis=1)


@public()
def bic_local(ds: CategoricalDataset, node: int, parents: Iterable[int] = ()) -> LocalScore:
    """BIC of one family: maximized log-likelihood minus `ln(N) / 2 * q * (r - 1)`.

    `q` multiplies the declared cardinalities of the parents, so states that never
    occur in the data still count in the penalty.
    """

    parents = tuple(sorted(set(parents)))
    if node in parents:
        raise ValueError(f"Node {node} cannot be its own parent")

    joint, marginal = _family_counts(ds, node, parents)
    loglik = float(np.sum(xlogy(joint, joint))) - float(np.sum(xlogy(marginal, marginal)))

    r = ds.cardinalities[node]
    q = math.prod(ds.cardinalities[p] for p in parents)
    penalty = 0.5 * math.log(ds.n_rows) * q * (r - 1)
    return LocalScore(node=node, parents=parents, value=loglik - penalty)


@public()
class LocalScoreCache:
    """Memo of local BIC values keyed by `(node, parents)`.

    Lookups are lock-free, inserts are guarded and idempotent, so a single cache
    may be shared by the scoring threads of one learn call.
    """

    def __init__(self, ds: CategoricalDataset):
        self.ds = ds
        self._scores: Dict[Tuple[int, Tuple[int, ...]], float] = {}
        self._lock = threading.Lock()

    def score(self, node: int, parents: Iterable[int] = ()) -> float:
        key = (node, tuple(sorted(set(parents))))
        value = self._scores.get(key)
        if value is not None:
            return value
        value = bic_local(self.ds, node, key[1]).value
        with self._lock:
            return self._scores.setdefault(key, value)

    def __len__(self) -> int:
        return len(self._scores)


@public()
def total_bic(
    ds: CategoricalDataset,
    dag: PartiallyDirectedGraph,
    cache: Optional[LocalScoreCache] = None,
) -> float:
    """Sum of local BIC scores over the families of `dag`."""

    if dag.n != ds.n_vars:
        raise ValueError(f"Graph has {dag.n} nodes, dataset has {ds.n_vars} variables")
    if dag.undirected:
        raise ValueError("Total BIC is defined for DAGs only, graph has undirected edges")
    cycle = find_cycle(dag)
    if cycle is not None:
        raise CyclicGraphError(f"Graph has a directed cycle {cycle}")

    if cache is None:
        return math.fsum(bic_local(ds, v, dag.parents(v)).value for v in range(dag.n))
    return math.fsum(cache.score(v, dag.parents(v)) for v in range(dag.n))
