"""Essential self-adjointness of Laplacians and Schrödinger operators on weighted graphs.

Typical use::

    from esagraph import catalog
    from esagraph.classify import classify

    verdict = classify(catalog.example2(A=0.0))
    verdict.status, verdict.rule      # ('NotESA', 'WeylNumeric')
"""
__version__ = "0.1.0"

from .graph_core import EndFamily, StarLikeSpec, TreeSpec, WeightedGraph, build_truncation  # noqa: E402
from .metric import MetricScheme  # noqa: E402

__all__ = [
    "EndFamily",
    "MetricScheme",
    "StarLikeSpec",
    "TreeSpec",
    "WeightedGraph",
    "build_truncation",
    "__version__",
]
