"""Finite paths, cylinder sets, the path-space metric, and tail structure.

Infinite paths are never materialized; every operation works on finite
prefixes.  A finite path of n edges names the cylinder set of all infinite
paths extending it.  The empty path anchored at a vertex v names the
level-0 set of all paths starting at v.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import DiagramSpec, Edge
from .errors import (
    DomainViolation,
    EmptyPath,
    LengthMismatch,
    NotAdmissible,
    PathError,
    TooShort,
    Unreachable,
)


@dataclass(frozen=True)
class FinitePath:
    """An admissible finite edge sequence (e_0, ..., e_{n-1}).

    ``anchor`` is only used for the empty path, where it records the
    starting vertex of the named level-0 cylinder.
    """

    edges: tuple
    anchor: int | None = None

    def __len__(self):
        return len(self.edges)

    @property
    def start(self) -> int:
        return self.edges[0].source if self.edges else self.anchor

    @property
    def end(self) -> int:
        """Range vertex of the path (in V_n for n edges)."""
        return self.edges[-1].target if self.edges else self.anchor

    def prefix(self, n: int) -> "FinitePath":
        if n < 1 or n > len(self.edges):
            raise TooShort(f"no prefix of length {n}")
        return FinitePath(self.edges[:n])

    def __str__(self):
        if not self.edges:
            return f"[{self.anchor}]"
        verts = "-".join(str(v) for v in
                         [self.edges[0].source] + [e.target for e in self.edges])
        mults = ",".join(str(e.mult) for e in self.edges)
        return f"{verts}:{mults}"


@dataclass(frozen=True)
class LevelPartitionCell:
    """All length-n cylinders terminating at one vertex of V_n."""

    level: int
    vertex: int
    members: tuple


@dataclass(frozen=True)
class PathDistance:
    """2^-N with N the first disagreement index; ``prefix_equal`` marks
    unequal-length paths agreeing on the common prefix, which name
    distinct nested cylinders rather than the same point."""

    value: float
    prefix_equal: bool = False


def empty_path(vertex: int) -> FinitePath:
    return FinitePath((), anchor=vertex)


def validate_path(edges) -> FinitePath:
    """Build a FinitePath, checking admissibility r(e_i) = s(e_{i+1}) and
    consecutive levels starting at 0."""
    edges = tuple(edges)
    if not edges:
        raise EmptyPath("a path needs at least one edge")
    for i, e in enumerate(edges):
        if e.level != i:
            raise NotAdmissible(i, f"edge at position {i} has level {e.level}")
        if i > 0 and edges[i - 1].target != e.source:
            raise NotAdmissible(i)
    return FinitePath(edges)


def dist(x: FinitePath, y: FinitePath) -> PathDistance:
    """Path-space metric on the common prefix: 2^-N at the first
    disagreement index N, zero for equal paths."""
    n = min(len(x), len(y))
    for i in range(n):
        if x.edges[i].key() != y.edges[i].key():
            return PathDistance(2.0 ** (-i))
    if len(x) == len(y):
        if not x.edges and x.anchor != y.anchor:
            return PathDistance(1.0)
        return PathDistance(0.0)
    return PathDistance(0.0, prefix_equal=True)


def shift(x: FinitePath, spec: DiagramSpec | None = None) -> FinitePath:
    """Drop the first edge and re-level the rest down by one."""
    if spec is not None:
        spec.require_stationary()
    if len(x) < 2:
        raise TooShort("shift needs at least two edges")
    return FinitePath(tuple(e.at_level(e.level - 1) for e in x.edges[1:]))


def prepend(e: Edge, x: FinitePath, spec: DiagramSpec | None = None) -> FinitePath:
    """The map tau_e: prefix x (starting at r(e)) with e, re-leveling x up.

    Halves the metric: dist(prepend(e,x), prepend(e,y)) = dist(x,y)/2.
    """
    if spec is not None:
        spec.require_stationary()
    if x.start != e.target:
        raise DomainViolation(
            f"path starts at {x.start}, not at r(e) = {e.target}")
    return FinitePath((e.at_level(0),)
                      + tuple(f.at_level(f.level + 1) for f in x.edges))


def one_edge_extensions(x: FinitePath, spec: DiagramSpec):
    """All admissible one-edge extensions of x, canonically ordered."""
    level = len(x)
    return [FinitePath(x.edges + (e,)) for e in spec.edges_from(x.end, level)]


def tail_equivalent_on_prefix(x: FinitePath, y: FinitePath, m: int) -> bool:
    """True iff x and y agree from index m on (within equal-length data)."""
    if len(x) != len(y):
        raise LengthMismatch(f"lengths {len(x)} and {len(y)} differ")
    return all(x.edges[i].key() == y.edges[i].key() for i in range(m, len(x)))


def enumerate_paths(spec: DiagramSpec, n: int, window: int | None = None):
    """All admissible paths of n edges starting inside the window
    (finite domains: the whole level)."""
    paths = [empty_path(v) for v in spec.vertices(window)]
    for _ in range(n):
        paths = [q for p in paths for q in one_edge_extensions(p, spec)]
    return paths


def cell(spec: DiagramSpec, n: int, v: int, window: int | None = None) -> LevelPartitionCell:
    """The partition cell X_v^(n): every length-n path terminating at v.

    Contains exactly H^(n)_v members.
    """
    if not spec.matrix(max(n - 1, 0)).in_domain(v):
        raise Unreachable(f"vertex {v} is not in the level domain")
    paths = [empty_path(v)]
    for back in range(n - 1, -1, -1):
        paths = [
            FinitePath((e,) + p.edges)
            for p in paths
            for e in spec.edges_into(p.start if p.edges else p.anchor, back)
        ]
    if n > 0 and not paths:
        raise Unreachable(f"no length-{n} paths reach vertex {v}")
    return LevelPartitionCell(n, v, tuple(paths))


def parse_path_literal(text: str, spec: DiagramSpec) -> FinitePath:
    """Parse the CLI path literal ``v0-v1-...:k0,k1,...`` (multiplicity
    indices optional, default 0)."""
    if ":" in text:
        vert_part, mult_part = text.split(":", 1)
        mults = [int(k) for k in mult_part.split(",")] if mult_part else []
    else:
        vert_part, mults = text, []
    verts = [int(v) for v in vert_part.split("-")]
    if len(verts) < 2:
        raise PathError("path literal needs at least two vertices")
    mults = mults + [0] * (len(verts) - 1 - len(mults))
    edges = [Edge(i, verts[i], verts[i + 1], mults[i]) for i in range(len(verts) - 1)]
    for e in edges:
        if not spec.has_edge(e):
            raise NotAdmissible(e.level, f"no edge {e} in the diagram")
    return validate_path(edges)
