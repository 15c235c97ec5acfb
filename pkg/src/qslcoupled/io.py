"""CSV artifacts: ``#``-prefixed metadata header, then a plain CSV body.

Floats are written in their shortest round-trip form (``repr``) so that
identical runs produce byte-identical bodies.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .wigner import WignerField

__all__ = ["format_value", "write_csv", "read_csv", "wigner_rows", "write_wigner_csv"]


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(stream, header: Sequence[str], rows: Iterable[Sequence],
              metadata: dict | None = None) -> None:
    """Write ``rows`` under ``header``; ``metadata`` becomes ``# key: value``
    comment lines (values JSON-encoded, keys sorted)."""
    stream.write(f"# qslcoupled {__version__}\n")
    for key in sorted(metadata or {}):
        stream.write(f"# {key}: {json.dumps(metadata[key], sort_keys=True)}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])


def read_csv(text: str) -> tuple[dict, list[str], list[list[str]]]:
    """Inverse of :func:`write_csv`: ``(metadata, header, rows)``."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition(": ")
            if sep:
                meta[key] = json.loads(value)
        else:
            body.append(line)
    rows = list(csv.reader(io.StringIO("\n".join(body))))
    return meta, rows[0], rows[1:]


def wigner_rows(wf: WignerField):
    """``(x, y, w)`` rows, ``y`` outer and ``x`` inner."""
    xs, ys = wf.grid.xs, wf.grid.ys
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            yield float(x), float(y), float(wf.values[i, j])


def write_wigner_csv(stream, wf: WignerField, metadata: dict | None = None) -> None:
    write_csv(stream, ["x", "y", "w"], wigner_rows(wf), metadata)
