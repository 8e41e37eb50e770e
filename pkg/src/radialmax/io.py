"""Artifact serialization: JSON documents and CSV tables with a schema header line.

JSON artifacts carry ``"schema": "radialmax/<kind>/v<version>"`` as their
first key; CSV artifacts start with a ``# schema: ...`` comment line.  Output
is deterministic: sorted keys, fixed float formatting.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._validation import ParameterError
from .dilation_sets import DilationSet, SetSpec, generate
from .type_sets import TypeRegion

SCHEMA_VERSION = 1


def schema_tag(kind):
    return f"radialmax/{kind}/v{SCHEMA_VERSION}"


def _default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _clean(obj):
    # JSON has no infinities; encode them as strings
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _clean(obj[k]) for k in sorted(obj)}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps_json(kind, payload):
    # schema first, everything else in sorted key order
    doc = {"schema": schema_tag(kind)}
    doc.update(_clean({k: v for k, v in payload.items() if k != "schema"}))
    return json.dumps(doc, default=_default, indent=2) + "\n"


def loads_json(text, kind=None):
    doc = json.loads(text)
    if kind is not None and doc.get("schema") != schema_tag(kind):
        raise ParameterError(f"expected schema {schema_tag(kind)}, found {doc.get('schema')!r}")
    return doc


def _fmt(value):
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def dumps_csv(kind, rows, columns=None):
    """CSV text with a schema comment line, a header and one line per row mapping."""
    rows = list(rows)
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    buf.write(f"# schema: {schema_tag(kind)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def loads_csv(text):
    """Parse text produced by :func:`dumps_csv`; returns ``(schema, rows)`` with string values."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# schema:"):
        raise ParameterError("missing schema header line")
    schema = lines[0].split(":", 1)[1].strip()
    reader = csv.DictReader(lines[1:])
    return schema, list(reader)


def write_text(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


# domain documents -----------------------------------------------------------------
def set_document(spec, E=None, include_cells=False):
    doc = {"spec": spec.to_dict()}
    if E is not None:
        doc["cells_count"] = len(E)
        doc["profile"] = None if E.profile is None else E.profile.to_dict()
        if include_cells:
            doc["set"] = E.to_dict()
    return doc


def load_set(path_or_doc, depth=None):
    """Return ``(spec, E)`` from a set-spec file or document.

    Accepts a bare spec ``{"generator", "params", "depth"}``, an artifact
    written by ``set make`` (optionally with stored cells), or a stored set.
    """
    if isinstance(path_or_doc, (str, Path)):
        try:
            doc = json.loads(Path(path_or_doc).read_text())
        except OSError as exc:
            raise OSError(f"cannot read set spec {path_or_doc}: {exc.strerror}") from exc
    else:
        doc = dict(path_or_doc)
    if "spec" in doc:
        spec = SetSpec.from_dict(doc["spec"])
        if "set" in doc and depth is None:
            return spec, DilationSet.from_dict(doc["set"])
    elif "generator" in doc:
        spec = SetSpec.from_dict(doc)
    elif "cells" in doc:
        return None, DilationSet.from_dict(doc)
    else:
        raise ParameterError("unrecognized set document")
    return spec, generate(spec, depth)


def region_document(R, vertices):
    """``{"d", "beta", "mode", "vertices"}`` with rationals as ``"a/b"`` strings and ``[num, den]`` pairs."""
    beta = R.beta
    return {
        "d": R.dimension,
        "beta": str(beta) if isinstance(beta, Fraction) else repr(float(beta)),
        "mode": R.mode,
        "vertices": [v.to_json() for v in vertices],
    }
