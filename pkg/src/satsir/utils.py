import concurrent.futures
import csv
import io
import logging
import math
import numbers

from satsir import _config as settings


logger = logging.getLogger(__name__)


CSV_DIGITS = 17
"""Significant digits of numbers written to CSV streams."""

JSON_DIGITS = 12
"""Significant digits of numbers written to JSON documents."""


class SatsirValueError(ValueError):
    def __init__(self, msg, attr_name=None, attr_value=None):
        super().__init__(msg)
        self.attr_name = attr_name
        self.attr_value = attr_value


class DetectionError(RuntimeError):
    """Numerical detection failed, ``diagnostics`` holds the search history."""

    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


def is_finite_real(value):
    return (
        isinstance(value, numbers.Real)
        and not isinstance(value, bool)
        and math.isfinite(value)
    )


def fmt_csv(value):
    """Format a CSV cell, numbers with full precision."""
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, numbers.Integral):
        return str(value)
    if isinstance(value, numbers.Real):
        return f'{float(value):.{CSV_DIGITS}g}'
    return str(value)


def round_json(value):
    """
    Recursively round floats to :data:`JSON_DIGITS` significant digits so
    that JSON documents stay readable and deterministic.
    """
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, complex):
        return {'re': round_json(value.real), 'im': round_json(value.imag)}
    if isinstance(value, numbers.Real):
        value = float(value)
        if not math.isfinite(value):
            return None
        return float(f'{value:.{JSON_DIGITS}g}')
    if isinstance(value, dict):
        return {k: round_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_json(v) for v in value]
    return value


def write_csv(header, rows, footer=None):
    """
    Render rows as CSV text.

    :returns: str
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt_csv(v) for v in row])
    if footer:
        writer.writerow([fmt_csv(v) for v in footer])
    return buf.getvalue()


def grid_map(fn, items, workers=None):
    """
    Apply ``fn`` over ``items`` preserving order, in a process pool when more
    than one worker is configured.
    """
    items = list(items)
    workers = settings.WORKERS if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]

    logger.debug(f'Evaluating {len(items)} grid points with {workers} workers')
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
