"""Text reports rendered from the jinja2 templates in `mecip/templates`."""

import functools
import logging

import jinja2
import pandas as pd

from mecip.graph import format_edge_list
from mecip.pipeline import LearnResult, StructMetrics


logger = logging.getLogger(__name__)


@functools.lru_cache(maxsize=None)
def _environment() -> jinja2.Environment:
    env = jinja2.Environment(
        loader=jinja2.PackageLoader('mecip', 'templates'),
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
        undefined=jinja2.StrictUndefined,
    )
    env.filters['repr'] = repr
    return env


def render(template_name: str, **variables) -> str:
    logger.debug("render template %r", template_name)
    return _environment().get_template(template_name).render(**variables)


def render_learn_report(result: LearnResult, header: str = "") -> str:
    return render(
        "learn_report.txt.j2",
        header=header,
        result=result,
        cpdag_edges=format_edge_list(result.cpdag),
        dag_edges=format_edge_list(result.dag),
    )


def render_metrics(metrics: StructMetrics) -> str:
    return render("metrics.txt.j2", metrics=metrics)


def render_aggregate(table: pd.DataFrame, header: str = "") -> str:
    """Per-cell table with 'mean (std)' columns, as produced by `benchmark.aggregate`."""
    return render("aggregate.txt.j2", header=header, rows=list(table.itertuples(index=False)))


def render_frame(table: pd.DataFrame, header: str = "") -> str:
    return header + table.to_string(index=False, float_format=lambda x: f"{x:.3f}") + "\n"
