"""Generalized Bratteli diagrams given by sparse incidence matrices.

A diagram is a graded graph with vertex levels V_0, V_1, ... and edge sets
determined by a sequence of incidence matrices F_n, where the (v, w) entry
counts the edges from w in V_n to v in V_{n+1}.  Rows of F_n (fixed target
vertex) must have finitely many nonzero entries.  Vertex levels may be
finite, indexed by the naturals, or indexed by the integers; the infinite
cases are represented by translation-invariant banded stencils and all
whole-level operations take an explicit finite window.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DiagramError, NonStationary, WindowTooSmall

FINITE = "finite"
NATURALS = "naturals"
INTEGERS = "integers"

DEFAULT_WINDOW = 64


@dataclass(frozen=True)
class Edge:
    """A single edge between consecutive levels.

    ``mult`` distinguishes parallel edges between the same vertex pair and
    ranges over 0 .. f_{target,source} - 1.
    """

    level: int
    source: int
    target: int
    mult: int = 0

    def key(self):
        """Level-free identity of the edge (source, target, mult)."""
        return (self.source, self.target, self.mult)

    def at_level(self, level: int) -> "Edge":
        return Edge(level, self.source, self.target, self.mult)

    def __str__(self):
        return f"({self.source}->{self.target}:{self.mult})@{self.level}"


class IncidenceMatrix:
    """Sparse nonnegative integer matrix F with entries f_{v,w}.

    Finite domains store an explicit triplet map.  Infinite domains
    (naturals / integers) store a translation-invariant stencil mapping the
    offset d = v - w to an edge count, which keeps every row and column
    finite by construction.
    """

    def __init__(self, domain, entries=None, stencil=None, band=None):
        self.domain = domain
        if domain == FINITE:
            if entries is None:
                raise DiagramError("finite matrix needs explicit entries")
            self.size = 1 + max((max(v, w) for (v, w) in entries), default=-1)
            self.entries = {k: int(c) for k, c in entries.items() if c}
            self.stencil = None
            self.band = None
        else:
            if stencil is None:
                raise DiagramError("infinite matrix needs a stencil")
            self.entries = None
            self.size = None
            self.stencil = {int(d): int(c) for d, c in stencil.items() if c}
            self.band = band if band is not None else max(
                (abs(d) for d in self.stencil), default=0)
            if any(abs(d) > self.band for d in self.stencil):
                raise DiagramError("stencil offset exceeds declared band")

    def with_size(self, size: int) -> "IncidenceMatrix":
        if self.domain != FINITE:
            return self
        m = IncidenceMatrix(FINITE, entries=dict(self.entries))
        m.size = max(m.size, size)
        return m

    def entry(self, v: int, w: int) -> int:
        """Edge count f_{v,w} from source w to target v."""
        if self.domain == FINITE:
            return self.entries.get((v, w), 0)
        if self.domain == NATURALS and (v < 0 or w < 0):
            return 0
        return self.stencil.get(v - w, 0)

    def in_domain(self, v: int) -> bool:
        if self.domain == FINITE:
            return 0 <= v < self.size
        if self.domain == NATURALS:
            return v >= 0
        return True

    def row(self, v: int):
        """Nonzero sources w for target v, as sorted (w, count) pairs."""
        if self.domain == FINITE:
            pairs = [(w, c) for (t, w), c in self.entries.items() if t == v]
        else:
            pairs = [(v - d, c) for d, c in self.stencil.items()
                     if self.domain != NATURALS or v - d >= 0]
        return sorted(pairs)

    def column(self, w: int):
        """Nonzero targets v for source w, as sorted (v, count) pairs.

        Finite for stencil matrices by bandedness; for explicit finite
        matrices by finiteness of the level.
        """
        if self.domain == FINITE:
            pairs = [(v, c) for (v, s), c in self.entries.items() if s == w]
        else:
            pairs = [(w + d, c) for d, c in self.stencil.items()
                     if self.domain != NATURALS or w + d >= 0]
        return sorted(pairs)

    def vertices(self, window: int | None = None):
        """Concrete vertex list for one level, restricted to a window."""
        if self.domain == FINITE:
            return list(range(self.size))
        if window is None:
            window = DEFAULT_WINDOW
        if self.domain == NATURALS:
            return list(range(0, window + 1))
        return list(range(-window, window + 1))

    def to_dense(self, targets, sources) -> np.ndarray:
        """Dense block F[targets, sources] as a float array."""
        a = np.zeros((len(targets), len(sources)))
        src_index = {w: j for j, w in enumerate(sources)}
        for i, v in enumerate(targets):
            for w, c in self.row(v):
                j = src_index.get(w)
                if j is not None:
                    a[i, j] = c
        return a

    @property
    def is_zero_one(self) -> bool:
        values = self.entries.values() if self.domain == FINITE else self.stencil.values()
        return all(c <= 1 for c in values)


@dataclass
class DiagramSpec:
    """A generalized Bratteli diagram defined by its incidence matrices."""

    kind: str                      # "stationary" | "sequence"
    matrices: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in ("stationary", "sequence"):
            raise DiagramError(f"unknown diagram kind {self.kind!r}")
        if not self.matrices:
            raise DiagramError("diagram needs at least one incidence matrix")
        domains = {m.domain for m in self.matrices}
        if len(domains) > 1:
            raise DiagramError("matrices must share a vertex domain")
        if self.kind == "sequence" and self.domain == FINITE:
            size = max(m.size for m in self.matrices)
            self.matrices = [m.with_size(size) for m in self.matrices]

    @property
    def domain(self) -> str:
        return self.matrices[0].domain

    @property
    def is_stationary(self) -> bool:
        return self.kind == "stationary"

    @property
    def is_zero_one(self) -> bool:
        return all(m.is_zero_one for m in self.matrices)

    def matrix(self, n: int) -> IncidenceMatrix:
        """Incidence matrix F_n."""
        if self.is_stationary:
            return self.matrices[0]
        if n >= len(self.matrices):
            raise DiagramError(f"no incidence matrix stored for level {n}")
        return self.matrices[n]

    def require_stationary(self):
        if not self.is_stationary:
            raise NonStationary("operation requires a stationary diagram")

    def vertices(self, window: int | None = None):
        return self.matrices[0].vertices(window)

    def edges_from(self, w: int, level: int = 0):
        """All edges with source w at the given level, canonically ordered."""
        f = self.matrix(level)
        return [Edge(level, w, v, k)
                for v, c in f.column(w) for k in range(c)]

    def edges_into(self, v: int, level: int):
        """All edges with target v in V_{level+1}, canonically ordered."""
        f = self.matrix(level)
        return [Edge(level, w, v, k)
                for w, c in f.row(v) for k in range(c)]

    def all_edges(self, level: int = 0, window: int | None = None):
        """Every edge of one level (finite domains, or a window), ordered
        by (source, target, multiplicity)."""
        edges = []
        for w in self.vertices(window):
            edges.extend(self.edges_from(w, level))
        return edges

    def edge_count(self, edge: Edge) -> int:
        return self.matrix(edge.level).entry(edge.target, edge.source)

    def has_edge(self, edge: Edge) -> bool:
        return 0 <= edge.mult < self.edge_count(edge)


@dataclass(frozen=True)
class HeightVector:
    """Counts of level-0-to-v paths: H^(n) = F_{n-1} ... F_0 (1,1,...)."""

    level: int
    values: dict

    def __getitem__(self, v: int) -> int:
        return self.values[v]


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.errors


def validate_diagram(spec: DiagramSpec) -> ValidationReport:
    """Check the structural axioms: every row and every column of each
    incidence matrix must be nonzero, and rows must be finite.  A column
    carrying a single edge is reported as an isolated-point warning only.
    """
    report = ValidationReport()
    for n, f in enumerate(spec.matrices):
        name = "F" if spec.is_stationary else f"F_{n}"
        if f.domain == FINITE:
            rows = {v: 0 for v in range(f.size)}
            cols = {w: 0 for w in range(f.size)}
            for (v, w), c in f.entries.items():
                rows[v] += 1 if c else 0
                cols[w] += 1 if c else 0
            for v, k in rows.items():
                if k == 0:
                    report.errors.append(f"{name}: row {v} is zero (no incoming edges)")
            for w, k in cols.items():
                if k == 0:
                    report.errors.append(f"{name}: column {w} is zero (no outgoing edges)")
                elif k == 1 and sum(c for (v, s), c in f.entries.items() if s == w) == 1:
                    report.warnings.append(
                        f"{name}: column {w} has a single edge (isolated-point warning)")
        else:
            if not f.stencil:
                report.errors.append(f"{name}: empty stencil")
            elif len(f.stencil) == 1 and next(iter(f.stencil.values())) == 1:
                report.warnings.append(
                    f"{name}: single-entry stencil (isolated-point warning)")
    return report


def height_vector(spec: DiagramSpec, n: int, window: int | None = None) -> HeightVector:
    """Exact path counts H^(n) = F_{n-1} ... F_0 1 on the window.

    For infinite domains the recursion is evaluated on a window inflated by
    the stencil band, so the returned values are exact; ``WindowTooSmall``
    is raised only when no finite window can be inferred.
    """
    if n < 0:
        raise DiagramError("level must be nonnegative")
    if spec.domain == FINITE:
        verts = spec.vertices()
        h = {v: 1 for v in verts}
        for k in range(n):
            f = spec.matrix(k)
            h = {v: sum(c * h[w] for w, c in f.row(v)) for v in verts}
        return HeightVector(n, h)
    if window is None:
        window = DEFAULT_WINDOW
    band = max(m.band for m in spec.matrices)
    h = {v: 1 for v in spec.vertices(window + n * band)}
    for k in range(n):
        f = spec.matrix(k)
        h = {v: sum(c * h[w] for w, c in f.row(v))
             for v in spec.vertices(window + (n - k - 1) * band)}
    return HeightVector(n, {v: h[v] for v in spec.vertices(window)})


def edge_graph_01(spec: DiagramSpec) -> DiagramSpec:
    """0-1 diagram on the edge set of a stationary diagram.

    The vertices of the result are the edges of the input (canonical order
    by source, target, multiplicity); edge-vertex e connects to edge-vertex
    f exactly when s(f) = r(e).  Finite domains only.
    """
    spec.require_stationary()
    if spec.domain != FINITE:
        raise DiagramError("edge graph is materialized for finite domains only")
    edges = spec.all_edges(0)
    index = {e.key(): i for i, e in enumerate(edges)}
    entries = {}
    for e in edges:
        for f in edges:
            if f.source == e.target:
                # incidence entry: target vertex f, source vertex e
                entries[(index[f.key()], index[e.key()])] = 1
    return DiagramSpec("stationary", [IncidenceMatrix(FINITE, entries=entries)])


def is_irreducible(spec: DiagramSpec, window: int | None = None,
                   max_m: int = 16) -> str:
    """Tri-state irreducibility test on a finite window.

    Returns ``"yes"`` if every ordered vertex pair in the window is joined
    by a path of at most ``max_m`` levels staying inside the window,
    ``"no-within-horizon"`` for finite domains with an unreachable pair,
    and ``"unknown"`` for infinite domains where the truncation could hide
    connecting paths.
    """
    verts = spec.vertices(window)
    k = len(verts)
    if spec.is_stationary:
        f = spec.matrix(0).to_dense(verts, verts) > 0
        reach = np.zeros((k, k), dtype=bool)
        power = np.eye(k, dtype=bool)
        for _ in range(max_m):
            power = power @ f
            reach |= power
        ok = reach.all()
    else:
        n_levels = len(spec.matrices)
        reach = np.zeros((k, k), dtype=bool)
        for start in range(n_levels):
            power = np.eye(k, dtype=bool)
            for m in range(start, min(start + max_m, n_levels)):
                power = spec.matrix(m).to_dense(verts, verts).astype(bool) @ power
                reach |= power
        ok = reach.all()
    if ok:
        return "yes"
    return "no-within-horizon" if spec.domain == FINITE else "unknown"


# ---------------------------------------------------------------------------
# JSON interchange

def _matrix_from_json(obj, vert) -> IncidenceMatrix:
    triplets = obj["triplets"]
    if vert["type"] == "finite":
        entries = {(int(v), int(w)): int(c) for v, w, c in triplets}
        m = IncidenceMatrix(FINITE, entries=entries)
        m.size = max(m.size, int(vert["count"]))
        return m
    # Infinite domains: triplets are read as a translation-invariant
    # stencil, offset = target - source.
    stencil = {}
    for v, w, c in triplets:
        stencil[int(v) - int(w)] = stencil.get(int(v) - int(w), 0) + int(c)
    domain = NATURALS if vert["type"] == "naturals" else INTEGERS
    return IncidenceMatrix(domain, stencil=stencil, band=vert.get("band"))


def diagram_from_dict(obj: dict) -> DiagramSpec:
    kind = obj["kind"]
    vert = obj["vertices"]
    matrices = [_matrix_from_json(m, vert) for m in obj["matrices"]]
    if kind == "stationary" and len(matrices) != 1:
        raise DiagramError("stationary diagram takes exactly one matrix")
    return DiagramSpec(kind, matrices)


def diagram_to_dict(spec: DiagramSpec) -> dict:
    m0 = spec.matrices[0]
    if spec.domain == FINITE:
        vert = {"type": "finite", "count": m0.size}
        mats = [{"triplets": sorted([v, w, c] for (v, w), c in m.entries.items())}
                for m in spec.matrices]
    else:
        vert = {"type": spec.domain}
        if spec.domain == INTEGERS:
            vert["band"] = m0.band
        mats = [{"triplets": sorted([d, 0, c] for d, c in m.stencil.items())}
                for m in spec.matrices]
    return {"kind": spec.kind, "vertices": vert, "matrices": mats}


def load_diagram(path) -> DiagramSpec:
    with open(path) as fh:
        return diagram_from_dict(json.load(fh))
