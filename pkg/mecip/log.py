"""Console logging for the `mecip` command line tool."""

import logging
import os
import sys
import warnings

from mecip.commons import public


logger = logging.getLogger(__name__)


VERBOSE_ENV = 'MECIP_VERBOSE'

_LOGGING_CONFIGURED = False


class _ConsoleStreamLogHandler(logging.Handler):
    """
    A handler class which writes logging records to `sys.stderr`.

    When `sys.stderr` is a TTY device a new line is not appended to log
    records with `incomplete_line` attribute set to true.  Benchmark runs use
    this to keep a single progress line per cell.
    """

    def __init__(self, stream=None):
        logging.Handler.__init__(self)
        self.last_incomplete_msg = ""
        self.stream = stream or sys.stderr
        self.isatty = getattr(self.stream, 'isatty', lambda: False)()

    def emit(self, record: logging.LogRecord):
        incomplete_line = getattr(record, 'incomplete_line', False) and self.isatty

        try:
            msg = self.format(record)
            if self.last_incomplete_msg:
                msg = "\r\033[K" + msg

            with self.lock:
                if incomplete_line:
                    self.last_incomplete_msg = msg
                else:
                    msg += "\n"
                    self.last_incomplete_msg = ""
                self.stream.write(msg)
                self.stream.flush()

        except RecursionError:  # See issue 36272
            raise
        except Exception:
            self.handleError(record)


def _uncaught_exception_handler(logger):
    def handler(exception_type, value, traceback):
        logger.error('Uncaught exception: %s', value, exc_info=(exception_type, value, traceback))
    return handler


@public()
def init_console_logging(verbose: bool = False, stream=None) -> None:
    """Installs a single stderr handler on the root logger.

    Verbose mode (flag or `MECIP_VERBOSE` env) switches to DEBUG and timestamps every line.
    """

    global _LOGGING_CONFIGURED
    if _LOGGING_CONFIGURED:
        warnings.warn(UserWarning("mecip console logging is already configured - skip"))
        return
    _LOGGING_CONFIGURED = True

    verbose = verbose or os.environ.get(VERBOSE_ENV, "")
    handler = _ConsoleStreamLogHandler(stream)
    if verbose:
        logging.basicConfig(
            level=logging.DEBUG,
            format="%(asctime)s| %(message)s",
            handlers=[handler],
            force=True,
        )
    else:
        logging.basicConfig(
            level=logging.INFO,
            format="%(message)s",
            handlers=[handler],
            force=True,
        )


@public()
def install_excepthook() -> None:
    sys.excepthook = _uncaught_exception_handler(logging.getLogger('uncaught_exception'))


def _reset_logging_for_tests() -> None:
    global _LOGGING_CONFIGURED
    _LOGGING_CONFIGURED = False
