"""The semibranching function system of a stationary 0-1 diagram.

Index set is the edge set E; the branch tau_e prepends e to any path
starting at r(e), the coding map is the one-sided shift.  Ranges R_e
partition the path space, and each domain D_e is the union of the ranges
R_f over f with s(f) = r(e), so branch composition is governed by a 0-1
matrix over the edge set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagram import FINITE, DiagramSpec
from .errors import (
    DiagramError,
    DomainViolation,
    NotZeroOne,
    TooShort,
    ZeroMeasureCylinder,
    ZeroTransition,
)
from .pathspace import FinitePath, prepend

QSTAT_TOL = 1e-6
QSTAT_TERMS = 64


@dataclass
class SemibranchingSystem:
    diagram: DiagramSpec
    edges: list                     # canonical order: (source, target)
    lambda_sets: dict               # edge pair -> tuple of edge pairs with s(f) = r(e)

    def domain_vertex(self, e) -> int:
        """D_e depends on r(e) only."""
        return e[1]


def build_sfs(diagram: DiagramSpec) -> SemibranchingSystem:
    """Construct the s.f.s. of a stationary 0-1 diagram and verify the
    range-partition property on the level."""
    diagram.require_stationary()
    if not diagram.is_zero_one:
        raise NotZeroOne("semibranching system requires a 0-1 diagram")
    if diagram.domain != FINITE:
        raise DiagramError("s.f.s. is materialized for finite levels only")
    edges = [(e.source, e.target) for e in diagram.all_edges(0)]
    if len(set(edges)) != len(edges):
        raise NotZeroOne("parallel edges present")
    # ranges partition: each length-1 path lies in exactly the R of its
    # first edge; sources must cover the level
    sources = {w for w, _ in edges}
    if sources != set(diagram.vertices()):
        raise DiagramError("ranges do not cover the path space")
    lam = {e: tuple(f for f in edges if f[0] == e[1]) for e in edges}
    return SemibranchingSystem(diagram, edges, lam)


@dataclass
class CKMatrix:
    """0-1 matrix over E x E with entry 1 exactly when s(f) = r(e)."""

    edges: list
    matrix: np.ndarray


def ck_matrix(sfs: SemibranchingSystem) -> CKMatrix:
    n = len(sfs.edges)
    idx = {e: i for i, e in enumerate(sfs.edges)}
    a = np.zeros((n, n), dtype=int)
    for e, members in sfs.lambda_sets.items():
        for f in members:
            a[idx[e], idx[f]] = 1
    return CKMatrix(list(sfs.edges), a)


@dataclass
class RNReport:
    """Finite-depth ratio sequence m(tau_e[x|n]) / m([x|n]) with a
    Cauchy-based limit verdict."""

    sequence: list
    limit: float | None
    converged: bool


def rn_derivative(measure, e, x: FinitePath, depth: int,
                  tol: float = 1e-9) -> RNReport:
    """Radon-Nikodym estimate of the branch tau_e at x by shrinking
    cylinders.  Constant in depth for stationary tail measures (value
    1/lambda) and for stationary Markov measures (closed-form ratio)."""
    if x.start != e.target:
        raise DomainViolation(f"path starts at {x.start}, not r(e) = {e.target}")
    if len(x) < depth:
        raise TooShort(f"path has {len(x)} edges, depth {depth} requested")
    seq = []
    for n in range(1, depth + 1):
        px = x.prefix(n)
        denom = measure.value(px)
        if denom == 0.0:
            raise ZeroMeasureCylinder(f"zero mass on prefix of length {n}")
        seq.append(float(measure.value(prepend(e, px)) / denom))
    half = seq[len(seq) // 2:]
    converged = bool(max(half) - min(half) < tol)
    return RNReport(seq, half[-1] if converged else None, converged)


@dataclass
class QuasiStationarityReport:
    partials: list
    verdict: bool               # bounded in (0, inf) and Cauchy
    bounds: tuple


def quasi_stationary_test(m, x: FinitePath, n_terms: int = QSTAT_TERMS,
                          tol: float = QSTAT_TOL) -> QuasiStationarityReport:
    """Partial products of the level-ratio p^(i+1)/p^(i) along x.

    Verdict is true when the partial products stay inside [tol, 1/tol]
    and are Cauchy within tol over the last half of the terms.
    """
    from .measures import TailInvariantMeasure, tail_to_markov

    if isinstance(m, TailInvariantMeasure):
        m = tail_to_markov(m, n_levels=n_terms + 2)
    n_terms = min(n_terms, len(x) - 1)
    partials, prod = [], 1.0
    for i in range(1, n_terms + 1):
        e = x.edges[i]
        num = _level_p(m, i + 1, e)
        den = _level_p(m, i, e)
        if num == 0.0 or den == 0.0:
            raise ZeroTransition(f"zero transition at level {i} on edge {e}")
        prod *= num / den
        partials.append(float(prod))
    half = partials[len(partials) // 2:]
    inside = all(tol <= p <= 1.0 / tol for p in partials)
    cauchy = bool(half) and bool(max(half) - min(half) < tol)
    return QuasiStationarityReport(partials, inside and cauchy, (tol, 1.0 / tol))


def _level_p(m, level, edge):
    table = m.levels[0] if m.stationary else m.levels[min(level, len(m.levels) - 1)]
    return table.get(edge.key(), 0.0)


def preimage_count(diagram: DiagramSpec, x: FinitePath) -> int:
    """|sigma^{-1}(x)| = number of edges f with r(f) = s(e_0), which is
    the height H^(1) at the starting vertex."""
    diagram.require_stationary()
    return len(diagram.edges_into(x.start, 0))
