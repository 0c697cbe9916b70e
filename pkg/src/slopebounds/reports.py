"""Serialization of reports: JSON envelopes, CSV tables, atomic writes."""

import csv
import io
import json
import math
import os
import tempfile
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__

TIMESTAMP_FIELD = "created"


def jsonable(obj):
    """Plain JSON types; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def envelope(kind, config, result):
    return {
        "artifact": "slopebounds",
        "version": __version__,
        "kind": kind,
        TIMESTAMP_FIELD: datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": jsonable(config),
        "result": jsonable(result),
    }


def dumps(doc):
    # float repr is the shortest string that round-trips to the same double
    return json.dumps(jsonable(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def strip_timestamp(doc):
    return {k: v for k, v in doc.items() if k != TIMESTAMP_FIELD}


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def csv_text(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def write_atomic(path, text):
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def schema(name):
    """Load a shipped JSON schema, e.g. ``schema("bound_report")``."""
    text = resources.files("slopebounds").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)
