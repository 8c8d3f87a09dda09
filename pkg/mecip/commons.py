from __future__ import annotations

import contextlib
import logging
import math
import time

from typing import (
    Any,
    Callable,
    Dict,
    Iterator,
    TypeVar,
)


logger = logging.getLogger(__name__)


_T = TypeVar('_T')
_F = TypeVar("_F", bound=Callable[..., Any])


def public(
    *,
    alias_for: _T | None = None,
) -> Callable[[_T], _T]:
    """Documentation decorator, used to mark function/class which should be considered as a public API.

    Only elements marked with this decorator may be treated as `stable API`.
    Any other elements may be deleted/changed without any warning or notice.

    Optional argument `alias_for` indicates that marked element should be discarded and
    value of `alias_for` should be used instead.  Wrapped (discarded) object still
    may provide type/signature hints for IDE/autocompletion.

    >> def _bic(ds, node, parents, cache=None): ...
    >> @public(alias_for=_bic)
    >> def bic(ds, node, parents): ...
    >> bic is _bic
    True
    """

    def wrapper(f: _F) -> _F:
        ff = alias_for if alias_for is not None else f
        if f.__doc__ and not ff.__doc__:
            ff.__doc__ = f.__doc__  # alias is used - pick the docstring
        elif f is not ff and f.__doc__ and ff.__doc__:
            logging.warning("Both %r and %r have their docstrings", f, ff)
        return ff

    return wrapper


@public()
class PhaseTimer:
    """Wall-clock stopwatch with named phases.

    Repeated phases accumulate, so a loop may time each iteration under the same name.

    >> timer = PhaseTimer()
    >> with timer.phase("solve"):
    ..     run_solver()
    >> timer.elapsed
    {'solve': 0.12}
    """

    def __init__(self, clock: Callable[[], float] = time.perf_counter):
        self._clock = clock
        self._elapsed: Dict[str, float] = {}

    @contextlib.contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = self._clock()
        try:
            yield
        finally:
            spent = self._clock() - start
            self._elapsed[name] = self._elapsed.get(name, 0.0) + spent
            logger.debug("Phase %s took %.3fs", name, spent)

    @property
    def elapsed(self) -> Dict[str, float]:
        return dict(self._elapsed)

    @property
    def total(self) -> float:
        return math.fsum(self._elapsed.values())


@public()
def format_mean_std(mean: float, std: float, digits: int = 3) -> str:
    """Formats a cell as 'mean (std)'; a missing std (single replicate) is shown as '-'."""
    if std is None or (isinstance(std, float) and math.isnan(std)):
        return f"{mean:.{digits}f} (-)"
    return f"{mean:.{digits}f} ({std:.{digits}f})"


def comment_header(items: Dict[str, Any], prefix: str = "#") -> str:
    """Renders `key: value` pairs as comment lines, used to stamp seeds and config into output files."""
    return "".join(f"{prefix} {k}: {v}\n" for k, v in items.items())
