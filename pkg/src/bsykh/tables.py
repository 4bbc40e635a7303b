"""Deterministic CSV / JSON emission for computed tables."""

import json


def format_cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return f"{float(v):.12g}"


def write_csv(path, columns):
    """columns: ordered mapping name -> sequence; 12 significant digits, LF endings."""
    names = list(columns)
    if not names:
        raise ValueError("no columns to write")
    n = len(columns[names[0]])
    for name in names:
        if len(columns[name]) != n:
            raise ValueError(f"column {name!r} has length {len(columns[name])} != {n}")
    with open(path, "w", newline="") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(n):
            fh.write(",".join(format_cell(columns[name][i]) for name in names) + "\n")


def write_json(path, meta, columns):
    """Single top-level object {"meta": ..., "columns": ...}; key order preserved."""
    payload = {
        "meta": meta,
        "columns": {name: [_jsonable(v) for v in vals] for name, vals in columns.items()},
    }
    with open(path, "w", newline="") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _jsonable(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return int(v)
    return float(v)


def read_json(path):
    with open(path) as fh:
        return json.load(fh)
