"""linkage_lab: gadget generators, exact congestion-path solvers, and
structural checkers for directed disjoint-path instances on DAGs."""

__version__ = "0.1.0"

from .digraph import SCHEMA_VERSION  # noqa: F401
