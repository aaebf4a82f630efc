"""CSV/JSON serialization with round-trip number formatting."""
from __future__ import annotations

import csv
import json

MODE_HEADER = ["d", "tau", "alpha", "ell", "branch", "a", "b", "gamma", "lambda"]
PROFILE_HEADER = ["r", "rho", "rho'", "rho''", "N", "N1", "N2", "N3"]
SOLUTION_HEADER = ["index", "lambda", "residual"]
SWEEP_HEADER = ["alpha", "lambda1", "lambda2"]


def fmt(x) -> str:
    """17 significant digits; complex numbers as 're+imj' (parsable by complex())."""
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    if isinstance(x, complex) or (hasattr(x, "imag") and getattr(x, "imag", 0) != 0):
        z = complex(x)
        return f"{z.real:.17g}{z.imag:+.17g}j"
    if isinstance(x, str):
        return x
    return f"{float(x):.17g}"


def parse(s: str):
    """Inverse of :func:`fmt` for numeric fields."""
    if s.endswith("j"):
        return complex(s)
    try:
        return int(s)
    except ValueError:
        return float(s)


def write_csv(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def mode_rows(p, modes):
    return [(p.d, p.tau, p.alpha, m.ell, m.branch, m.a, m.b, m.gamma, m.lam) for m in modes]


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, complex):
        return fmt(obj)
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def dump_json(obj) -> str:
    """JSON with repr-exact floats and sorted keys."""
    return json.dumps(_clean(obj), sort_keys=True, allow_nan=True)
