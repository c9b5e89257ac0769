import json

from . import _core
from ._core import BudgetError, GraphError

__all__ = ["BudgetError", "GraphError", "canonical", "invariants", "homology", "specseq", "pe_series", "wbar_grid", "verify"]


def canonical(text):
    return _core.canonical(text)


def invariants(text, cls=()):
    return json.loads(_core.invariants(text, list(cls)))


def homology(text, cls=(), rect=(), bad=()):
    return json.loads(_core.homology(text, list(cls), list(rect), list(bad)))


def specseq(text, s=(), nmax=10, cls=(), page=0, bad=(), jobs=1):
    return json.loads(_core.specseq(text, list(s), nmax, list(cls), page, list(bad), jobs))


def pe_series(text, s=(), nmax=20, k=0, cls=(), bad=()):
    """k = 0 is the limit page."""
    return json.loads(_core.pe_series(text, list(s), nmax, k, list(cls), list(bad)))


def wbar_grid(text, bad, rect=(), cls=()):
    return _core.wbar_grid(text, list(bad), list(rect), list(cls))


def verify(text, s=(), nmax=6, cls=()):
    return json.loads(_core.verify(text, list(s), nmax, list(cls)))
