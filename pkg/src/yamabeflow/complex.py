"""Closed simplicial 3-complexes carrying conformal vertex weights.

A complex is a list of tetrahedra, each a 4-tuple of integer vertex ids.
Tetrahedra are identified by their position in that list, so two distinct
tetrahedra may span the same four vertices (the double tetrahedron).  Edges,
faces and stars are derived from the tetrahedra and never stored apart from
them.

The text format is line oriented::

    # comment
    radius 4 2.0
    tet 1 2 3 4
    tet 1 2 3 4

Vertices that appear in a ``tet`` line without a ``radius`` line get weight
1.0.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "ComplexError",
    "ParseError",
    "SimplicialComplex",
    "MetricAssignment",
    "PRESETS",
    "parse_complex",
    "serialize_complex",
    "load_complex",
    "preset",
    "validate_complex",
]


class ComplexError(ValueError):
    """Invalid complex or metric; ``report`` lists every violated invariant."""

    def __init__(self, message: str, report: Iterable[str] = ()):
        super().__init__(message)
        self.report = list(report)


class ParseError(ComplexError):
    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class SimplicialComplex:
    """Vertex/edge/face/tetrahedron incidence of a 3-complex.

    Only ``tetrahedra`` (and optionally extra isolated ``vertices``) are
    supplied; everything else is derived in ``__post_init__``.  Instances are
    not validated on construction, use :func:`validate_complex` for that.
    """

    tetrahedra: tuple[tuple[int, int, int, int], ...]
    vertices: tuple[int, ...] = ()
    edges: tuple[tuple[int, int], ...] = field(init=False)
    faces: tuple[tuple[int, int, int], ...] = field(init=False)
    star: Mapping[int, tuple[int, ...]] = field(init=False, repr=False)
    edge_tets: Mapping[tuple[int, int], tuple[int, ...]] = field(init=False, repr=False)
    face_tets: Mapping[tuple[int, int, int], tuple[int, ...]] = field(init=False, repr=False)

    def __post_init__(self):
        tets = tuple(tuple(int(v) for v in t) for t in self.tetrahedra)
        for t in tets:
            if len(t) != 4:
                raise ComplexError(f"tetrahedron {t} does not have 4 vertices")
            if any(v < 0 for v in t):
                raise ComplexError(f"tetrahedron {t} has a negative vertex id")
        verts = set(int(v) for v in self.vertices)
        star = defaultdict(list)
        edge_tets = defaultdict(list)
        face_tets = defaultdict(list)
        for n, t in enumerate(tets):
            verts.update(t)
            for v in set(t):
                star[v].append(n)
            for e in {tuple(sorted(p)) for p in itertools.combinations(t, 2)}:
                edge_tets[e].append(n)
            for f in {tuple(sorted(p)) for p in itertools.combinations(t, 3)}:
                face_tets[f].append(n)
        set_ = object.__setattr__
        set_(self, "tetrahedra", tets)
        set_(self, "vertices", tuple(sorted(verts)))
        set_(self, "edges", tuple(sorted(e for e in edge_tets if e[0] != e[1])))
        set_(self, "faces", tuple(sorted(f for f in face_tets if len(set(f)) == 3)))
        set_(self, "star", MappingProxyType({v: tuple(star[v]) for v in self.vertices}))
        set_(self, "edge_tets", MappingProxyType({e: tuple(edge_tets[e]) for e in self.edges}))
        set_(self, "face_tets", MappingProxyType({f: tuple(face_tets[f]) for f in self.faces}))

    @property
    def index(self) -> dict[int, int]:
        """Vertex id -> position in ``vertices``."""
        return {v: i for i, v in enumerate(self.vertices)}

    @property
    def tet_array(self) -> np.ndarray:
        """(T, 4) integer array of vertex positions, slot order preserved."""
        idx = self.index
        return np.array([[idx[v] for v in t] for t in self.tetrahedra], dtype=np.intp).reshape(-1, 4)

    def __len__(self):
        return len(self.tetrahedra)


@dataclass(frozen=True)
class MetricAssignment:
    """Positive weight per vertex; edge {i, j} has length r_i + r_j."""

    r: Mapping[int, float]

    def __post_init__(self):
        r = {int(v): float(x) for v, x in dict(self.r).items()}
        bad = [v for v, x in r.items() if not (x > 0 and math.isfinite(x))]
        if bad:
            raise ComplexError(f"nonpositive weight at vertices {sorted(bad)}")
        object.__setattr__(self, "r", MappingProxyType(dict(sorted(r.items()))))

    def array(self, vertices: Iterable[int]) -> np.ndarray:
        return np.array([self.r[v] for v in vertices], dtype=float)

    def with_radii(self, overrides: Mapping[int, float]) -> "MetricAssignment":
        r = dict(self.r)
        r.update(overrides)
        return MetricAssignment(r)

    @classmethod
    def from_array(cls, vertices: Iterable[int], values) -> "MetricAssignment":
        return cls(dict(zip(vertices, np.asarray(values, dtype=float).tolist())))

    def edge_length(self, i: int, j: int) -> float:
        return self.r[i] + self.r[j]


def validate_complex(c: SimplicialComplex) -> list[str]:
    """Return a list of violated invariants; empty when ``c`` is a valid closed complex."""
    report = []
    if not c.tetrahedra:
        report.append("empty complex: no tetrahedra")
    for n, t in enumerate(c.tetrahedra):
        if len(set(t)) != 4:
            report.append(f"repeated vertex in tetrahedron {n}: {t}")
    for f, tets in c.face_tets.items():
        if len(tets) == 1:
            report.append(f"boundary face {f}: faces have only 1 incident tetrahedron")
        elif len(tets) > 2:
            report.append(f"non-manifold face {f}: in {len(tets)} tetrahedra")
    ncomp = _count_components(c)
    if ncomp > 1:
        report.append(f"disconnected skeleton: {ncomp} components")
    return report


def _count_components(c: SimplicialComplex) -> int:
    parent = {v: v for v in c.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for i, j in c.edges:
        parent[find(i)] = find(j)
    return len({find(v) for v in c.vertices})


def parse_complex(text: str) -> tuple[SimplicialComplex, MetricAssignment]:
    """Parse the text format, validate, and return the complex with its metric.

    Raises
    ------
    ParseError
        On a malformed line (the line number is in the message).
    ComplexError
        On nonpositive weights or when the complex fails validation.
    """
    tets = []
    radii = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        if key == "tet":
            if len(args) != 4:
                raise ParseError(f"'tet' needs 4 vertex ids, got {len(args)}", lineno)
            try:
                ids = tuple(int(a) for a in args)
            except ValueError:
                raise ParseError(f"bad vertex id in {line!r}", lineno) from None
            if any(v < 0 for v in ids):
                raise ParseError("vertex ids must be non-negative", lineno)
            tets.append(ids)
        elif key == "radius":
            if len(args) != 2:
                raise ParseError("'radius' needs a vertex id and a value", lineno)
            try:
                v, x = int(args[0]), float(args[1])
            except ValueError:
                raise ParseError(f"bad radius line {line!r}", lineno) from None
            if v < 0:
                raise ParseError("vertex ids must be non-negative", lineno)
            if not (x > 0 and math.isfinite(x)):
                raise ParseError(f"nonpositive weight {args[1]} for vertex {v}", lineno)
            if v in radii:
                raise ParseError(f"duplicate radius for vertex {v}", lineno)
            radii[v] = x
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)

    c = SimplicialComplex(tuple(tets), tuple(radii))
    report = validate_complex(c)
    if report:
        raise ComplexError("invalid complex: " + "; ".join(report), report)
    m = MetricAssignment({v: radii.get(v, 1.0) for v in c.vertices})
    return c, m


def load_complex(path) -> tuple[SimplicialComplex, MetricAssignment]:
    with open(path, encoding="utf-8") as fh:
        return parse_complex(fh.read())


def serialize_complex(c: SimplicialComplex, m: MetricAssignment) -> str:
    lines = [f"radius {v} {m.r[v]!r}" for v in c.vertices]
    lines += ["tet " + " ".join(str(v) for v in t) for t in c.tetrahedra]
    return "\n".join(lines) + "\n"


PRESETS = {
    "double_tetrahedron": ((1, 2, 3, 4), (1, 2, 3, 4)),
    "boundary_4_simplex": tuple(itertools.combinations(range(1, 6), 4)),
}


def preset(name: str) -> tuple[SimplicialComplex, MetricAssignment]:
    """The double tetrahedron or the boundary of the 4-simplex, with r = 1."""
    try:
        tets = PRESETS[name]
    except KeyError:
        raise ComplexError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    c = SimplicialComplex(tets)
    return c, MetricAssignment({v: 1.0 for v in c.vertices})
