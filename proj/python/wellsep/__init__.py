"""Python access to the wellsep embedding pipeline."""

import json

from . import _core
from ._core import ArgumentError, Graph, WellsepError, brute_force_embed, solve_lp, verify_embedding

__all__ = [
    "ArgumentError",
    "Graph",
    "WellsepError",
    "brute_force_embed",
    "check_regular",
    "find_kfactor",
    "generate_h",
    "generate_host",
    "run_cell_trial",
    "solve_lp",
    "verify_embedding",
]


def _spec(spec):
    return "" if spec is None else json.dumps(spec)


def generate_host(spec=None, seed=0):
    return _core.generate_host(_spec(spec), seed)


def generate_h(spec=None, seed=0):
    """Returns (graph, separation dict or None)."""
    g, sep = _core.generate_h(_spec(spec), seed)
    return g, (json.loads(sep) if sep else None)


def find_kfactor(reduced, k):
    out = _core.find_kfactor(reduced, k)
    return None if out is None else json.loads(out)


def check_regular(g, a, b, eps):
    return json.loads(_core.check_regular(g, list(a), list(b), eps))


def run_cell_trial(cell, seed):
    return json.loads(_core.run_cell_trial(json.dumps(cell), seed))
