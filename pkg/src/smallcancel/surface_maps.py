"""Maps on closed oriented surfaces, given as rotation systems on darts.

A map is stored as a set of vertex rotations (cyclic orderings of darts)
together with a fixed-point-free involution pairing each dart with its
reverse.  Faces are recovered by walking ``next(d) = sigma(pair(d))``, so
the whole combinatorial surface is determined by the two permutations.
Some faces may be marked as holes: cells removed from the surface, whose
boundary walks play the role of the long outer word in an annular diagram.

On top of the raw maps this module provides the curvature machinery used
by the combinatorial lemmas: corner weight schemes and the exact weight
test, classification of interior cells by how many arcs of the hole
boundary they touch, the off-hole forest check, and the contraction that
turns a diagram into its town/highway model.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .words import CyclicWord, Word, format_letter, format_letters, parse_letters

# A corner is identified by (face index, position in the face walk).  The
# corner (f, i) sits at the start vertex of the i-th dart of the walk of f,
# in the rotation sector that ends with that dart.
Corner = tuple[int, int]


class SurfaceMap:
    """An oriented combinatorial map with optional hole faces and labels.

    Parameters:

    - ``rotations``: one cyclic sequence of darts per vertex.  Darts are
      arbitrary integers; each must appear in exactly one rotation, exactly
      once.
    - ``pairing``: the reversal involution, as a mapping or an iterable of
      unordered dart pairs.  It must be fixed-point free and cover every
      dart.
    - ``labels``: optional mapping from darts to nonzero letters.  Paired
      darts must carry inverse letters; if only one side of an edge is
      given the other side is filled in.
    - ``holes``: face indices (in traversal order, see ``faces``) marked
      as holes.

    Faces are traced deterministically: the first face starts at the
    smallest dart, walks ``next(d) = sigma(pair(d))`` until it closes, and
    subsequent faces start at the smallest dart not yet visited.
    """

    __slots__ = (
        "rotations",
        "pairing",
        "labels",
        "holes",
        "darts",
        "faces",
        "_vertex_of",
        "_sigma",
        "_sigma_inv",
        "_face_pos",
    )

    def __init__(
        self,
        rotations: Iterable[Iterable[int]],
        pairing: Union[Mapping[int, int], Iterable[Sequence[int]]],
        labels: Optional[Mapping[int, int]] = None,
        holes: Iterable[int] = (),
    ) -> None:
        rots = tuple(tuple(r) for r in rotations)
        if not rots or any(not r for r in rots):
            raise ValueError("every vertex needs a nonempty rotation")

        vertex_of: dict[int, int] = {}
        sigma: dict[int, int] = {}
        sigma_inv: dict[int, int] = {}
        for v, rot in enumerate(rots):
            for i, d in enumerate(rot):
                if d in vertex_of:
                    raise ValueError(f"dart {d} appears twice in the rotations")
                vertex_of[d] = v
                nxt = rot[(i + 1) % len(rot)]
                sigma[d] = nxt
                sigma_inv[nxt] = d

        darts = tuple(sorted(vertex_of))

        pair: dict[int, int] = {}
        if isinstance(pairing, Mapping):
            items = pairing.items()
        else:
            items = [(p[0], p[1]) for p in pairing]
        for a, b in items:
            for x, y in ((a, b), (b, a)):
                if x not in vertex_of:
                    raise ValueError(f"pairing mentions unknown dart {x}")
                if x == y:
                    raise ValueError(f"dart {x} paired with itself")
                if pair.setdefault(x, y) != y:
                    raise ValueError(f"dart {x} paired inconsistently")
        missing = [d for d in darts if d not in pair]
        if missing:
            raise ValueError(f"darts without a paired reverse: {missing}")

        lab: dict[int, int] = {}
        if labels:
            for d, letter in labels.items():
                if d not in vertex_of:
                    raise ValueError(f"label on unknown dart {d}")
                if letter == 0:
                    raise ValueError("labels must be nonzero letters")
                lab[d] = letter
            for d, letter in list(lab.items()):
                other = pair[d]
                got = lab.setdefault(other, -letter)
                if got != -letter:
                    raise ValueError(
                        f"darts {d} and {other} are paired but carry "
                        f"non-inverse labels"
                    )

        # Connectivity: every dart reachable from the smallest one through
        # the rotation and the pairing.
        seen = {darts[0]}
        stack = [darts[0]]
        while stack:
            d = stack.pop()
            for e in (sigma[d], pair[d]):
                if e not in seen:
                    seen.add(e)
                    stack.append(e)
        if len(seen) != len(darts):
            raise ValueError("map is not connected")

        faces: list[tuple[int, ...]] = []
        face_pos: dict[int, Corner] = {}
        for d in darts:
            if d in face_pos:
                continue
            walk = []
            cur = d
            while cur not in face_pos:
                face_pos[cur] = (len(faces), len(walk))
                walk.append(cur)
                cur = sigma[pair[cur]]
            if cur != d:
                raise ValueError("face walk failed to close")
            faces.append(tuple(walk))

        hole_set = frozenset(holes)
        for f in hole_set:
            if not 0 <= f < len(faces):
                raise ValueError(f"hole index {f} is not a face")

        self.rotations = rots
        self.pairing = pair
        self.labels = lab
        self.holes = hole_set
        self.darts = darts
        self.faces = tuple(faces)
        self._vertex_of = vertex_of
        self._sigma = sigma
        self._sigma_inv = sigma_inv
        self._face_pos = face_pos

    # -- basic structure -------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self.rotations)

    @property
    def edge_count(self) -> int:
        return len(self.darts) // 2

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def vertex_of(self, dart: int) -> int:
        return self._vertex_of[dart]

    def sigma(self, dart: int) -> int:
        """Next dart counterclockwise around the start vertex."""
        return self._sigma[dart]

    def sigma_inv(self, dart: int) -> int:
        return self._sigma_inv[dart]

    def next_in_face(self, dart: int) -> int:
        return self._sigma[self.pairing[dart]]

    def degree(self, vertex: int) -> int:
        return len(self.rotations[vertex])

    def face_of(self, dart: int) -> int:
        return self._face_pos[dart][0]

    def corner_of(self, dart: int) -> Corner:
        """The corner swept between arriving along the face walk and
        leaving along ``dart``."""
        return self._face_pos[dart]

    def dart_of_corner(self, corner: Corner) -> int:
        f, i = corner
        return self.faces[f][i]

    def corners(self) -> list[Corner]:
        return [self._face_pos[d] for d in self.darts]

    def corners_at_vertex(self, vertex: int) -> list[Corner]:
        return [self._face_pos[d] for d in self.rotations[vertex]]

    def corner_vertex(self, corner: Corner) -> int:
        return self._vertex_of[self.dart_of_corner(corner)]

    def corner_neighbors(self, corner: Corner) -> tuple[Corner, Corner]:
        """The two corners adjacent to this one in the vertex rotation."""
        d = self.dart_of_corner(corner)
        return self._face_pos[self._sigma[d]], self._face_pos[self._sigma_inv[d]]

    def is_hole_corner(self, corner: Corner) -> bool:
        return corner[0] in self.holes

    def euler_characteristic(self) -> int:
        return self.vertex_count - self.edge_count + self.face_count

    def interior_faces(self) -> list[int]:
        return [f for f in range(len(self.faces)) if f not in self.holes]

    def edges(self) -> list[tuple[int, int]]:
        """Each edge once, as (dart, paired dart) with the smaller first."""
        return [(d, self.pairing[d]) for d in self.darts if d < self.pairing[d]]

    def face_label(self, face: int) -> tuple[int, ...]:
        """The raw letter sequence read along the face walk (unreduced)."""
        out = []
        for d in self.faces[face]:
            if d not in self.labels:
                raise ValueError(f"dart {d} carries no label")
            out.append(self.labels[d])
        return tuple(out)

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"SurfaceMap(V={self.vertex_count}, E={self.edge_count}, "
            f"F={self.face_count}, holes={sorted(self.holes)})"
        )


def trace_faces(m: SurfaceMap) -> tuple[tuple[int, ...], ...]:
    return m.faces


def euler_characteristic(m: SurfaceMap) -> int:
    return m.euler_characteristic()


# -- corner weights ------------------------------------------------------


@dataclass(frozen=True)
class WeightScheme:
    """An exact rational weight for every corner of a map."""

    weights: Mapping[Corner, Fraction]

    def weight(self, corner: Corner) -> Fraction:
        return self.weights[corner]


@dataclass(frozen=True)
class WeightTestResult:
    vertex_curvatures: Mapping[int, Fraction]
    face_curvatures: Mapping[int, Fraction]
    total: Fraction


def weight_test(m: SurfaceMap, scheme: WeightScheme) -> WeightTestResult:
    """Evaluate the combinatorial Gauss-Bonnet bookkeeping exactly.

    Each vertex receives 2 minus the sum of its corner weights; each face
    receives 2 minus the sum of the co-weights (1 - weight) of its
    corners.  The grand total is checked against twice the Euler
    characteristic, which it must equal for any weight assignment.
    """
    missing = [c for c in m.corners() if c not in scheme.weights]
    if missing:
        raise ValueError(f"scheme misses corners, e.g. {missing[0]}")
    extra = set(scheme.weights) - set(m.corners())
    if extra:
        raise ValueError(f"scheme has weights for unknown corners: {extra}")

    vertex_curv: dict[int, Fraction] = {}
    for v in range(m.vertex_count):
        total = sum(
            (scheme.weights[c] for c in m.corners_at_vertex(v)),
            Fraction(0),
        )
        vertex_curv[v] = 2 - total

    face_curv: dict[int, Fraction] = {}
    for f, walk in enumerate(m.faces):
        total = sum(
            (1 - scheme.weights[m.corner_of(d)] for d in walk),
            Fraction(0),
        )
        face_curv[f] = 2 - total

    grand = sum(vertex_curv.values(), Fraction(0)) + sum(
        face_curv.values(), Fraction(0)
    )
    expected = Fraction(2 * m.euler_characteristic())
    assert grand == expected, (
        f"weight bookkeeping broke: total {grand} != 2*chi {expected}"
    )
    return WeightTestResult(vertex_curv, face_curv, grand)


def build_scheme(m: SurfaceMap, rule: str) -> WeightScheme:
    """The two concrete weight assignments used by the curvature lemmas.

    ``rule="lemma1"``: hole corners weigh 1; at a vertex with k hole
    corners and l interior corners each interior corner weighs (2-k)/l.
    Every vertex then has curvature 0 and all curvature concentrates in
    the faces.

    ``rule="lemma2"``: hole corners weigh 1.  An interior corner at a
    vertex of degree at least 3 weighs 1/2 if exactly one of its two
    rotation neighbors is a hole corner and 0 if both are; every other
    corner weighs 1.
    """
    if len(m.holes) != 1:
        raise ValueError("weight rules expect exactly one hole")
    weights: dict[Corner, Fraction] = {}
    if rule == "lemma1":
        for v in range(m.vertex_count):
            cs = m.corners_at_vertex(v)
            hole = [c for c in cs if m.is_hole_corner(c)]
            interior = [c for c in cs if not m.is_hole_corner(c)]
            for c in hole:
                weights[c] = Fraction(1)
            if interior:
                share = Fraction(2 - len(hole), len(interior))
                for c in interior:
                    weights[c] = share
    elif rule == "lemma2":
        for c in m.corners():
            if m.is_hole_corner(c):
                weights[c] = Fraction(1)
                continue
            v = m.corner_vertex(c)
            if m.degree(v) <= 2:
                weights[c] = Fraction(1)
                continue
            hole_neighbors = sum(
                1 for n in m.corner_neighbors(c) if m.is_hole_corner(n)
            )
            if hole_neighbors == 1:
                weights[c] = Fraction(1, 2)
            elif hole_neighbors == 2:
                weights[c] = Fraction(0)
            else:
                weights[c] = Fraction(1)
    else:
        raise ValueError(f"unknown weight rule {rule!r}")
    return WeightScheme(weights)


# -- pieces and cell classification ---------------------------------------


@dataclass(frozen=True)
class Piece:
    """A maximal edge path through degree-2 vertices.

    ``darts`` lists one dart per edge, oriented along the path; interior
    vertices of the path all have degree 2, the two endpoints do not.
    """

    darts: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.darts)


def piece_sides(m: SurfaceMap, piece: Piece) -> tuple[int, int]:
    """The two faces along a piece (they are constant along it)."""
    d = piece.darts[0]
    return m.face_of(d), m.face_of(m.pairing[d])


def piece_endpoints(m: SurfaceMap, piece: Piece) -> tuple[int, int]:
    return m.vertex_of(piece.darts[0]), m.vertex_of(m.pairing[piece.darts[-1]])


def pieces(m: SurfaceMap) -> list[Piece]:
    """Decompose the edges of the map into maximal degree-2 paths.

    Requires every vertex to have degree at least 2 and at least one
    vertex of degree more than 2.  Each piece is reported once, oriented
    away from its smallest eligible starting dart.
    """
    if any(m.degree(v) < 2 for v in range(m.vertex_count)):
        raise ValueError("pieces are undefined with degree-1 vertices")
    if all(m.degree(v) == 2 for v in range(m.vertex_count)):
        raise ValueError("pieces are undefined when every vertex has degree 2")
    used: set[int] = set()
    out: list[Piece] = []
    for d in m.darts:
        if d in used or m.degree(m.vertex_of(d)) == 2:
            continue
        path = [d]
        cur = d
        while True:
            end = m.vertex_of(m.pairing[cur])
            if m.degree(end) != 2:
                break
            a, b = m.rotations[end]
            cur = b if a == m.pairing[cur] else a
            path.append(cur)
        for e in path:
            used.add(e)
            used.add(m.pairing[e])
        out.append(Piece(tuple(path)))
    return out


@dataclass(frozen=True)
class SmallCancellationReport:
    ok: bool
    findings: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def check_cprime_map(m: SurfaceMap, lam: Fraction) -> SmallCancellationReport:
    """Check the metric conditions a reduced diagram must satisfy.

    Every piece between two interior cells must be shorter than ``lam``
    times either cell's boundary length, and every piece between an
    interior cell and a hole must be shorter than (1/2 + lam) times the
    cell's boundary length.  Pieces between two holes are unconstrained.
    """
    lam = Fraction(lam)
    findings: list[str] = []
    for piece in pieces(m):
        f1, f2 = piece_sides(m, piece)
        hole1, hole2 = f1 in m.holes, f2 in m.holes
        if hole1 and hole2:
            continue
        if not hole1 and not hole2:
            for cell, other in ((f1, f2), (f2, f1)):
                limit = lam * len(m.faces[cell])
                if piece.length >= limit:
                    findings.append(
                        f"piece of length {piece.length} between interior "
                        f"cells {f1} and {f2} is not shorter than "
                        f"{limit} = lambda * |boundary of cell {cell}|"
                    )
        else:
            cell = f2 if hole1 else f1
            limit = (Fraction(1, 2) + lam) * len(m.faces[cell])
            if piece.length >= limit:
                findings.append(
                    f"piece of length {piece.length} between cell {cell} "
                    f"and a hole is not shorter than {limit} = "
                    f"(1/2 + lambda) * |boundary of cell {cell}|"
                )
    return SmallCancellationReport(not findings, tuple(findings))


ORDINARY = "ordinary"
SPECIAL_1 = "1-special"
SPECIAL_2 = "2-special"


def cell_kind(hole_piece_count: int) -> str:
    if hole_piece_count == 2:
        return ORDINARY
    if hole_piece_count == 3:
        return SPECIAL_1
    if hole_piece_count == 4:
        return SPECIAL_2
    return f"other({hole_piece_count})"


@dataclass(frozen=True)
class CellClassification:
    """Interior cells bucketed by their number of hole-boundary pieces."""

    kinds: Mapping[int, str]
    hole_piece_counts: Mapping[int, int]
    findings: tuple[str, ...]

    def count(self, kind: str) -> int:
        return sum(1 for k in self.kinds.values() if k == kind)


def classify_cells(m: SurfaceMap) -> CellClassification:
    counts = {f: 0 for f in m.interior_faces()}
    for piece in pieces(m):
        f1, f2 = piece_sides(m, piece)
        if f1 in m.holes and f2 not in m.holes:
            counts[f2] += 1
        elif f2 in m.holes and f1 not in m.holes:
            counts[f1] += 1
    kinds = {f: cell_kind(n) for f, n in counts.items()}
    findings = tuple(
        f"cell {f} touches the hole boundary along {n} pieces; "
        f"a reduced annular diagram admits no cell with fewer than 2"
        for f, n in sorted(counts.items())
        if n < 2
    )
    return CellClassification(kinds, counts, findings)


# -- off-hole forest and model extraction ---------------------------------


def offhole_edges(m: SurfaceMap) -> list[tuple[int, int]]:
    """Edges with an interior face on both sides."""
    out = []
    for d, e in m.edges():
        if m.face_of(d) not in m.holes and m.face_of(e) not in m.holes:
            out.append((d, e))
    return out


@dataclass(frozen=True)
class ForestCheck:
    is_forest: bool
    high_degree_vertices: tuple[int, ...]
    offhole_edge_count: int

    @property
    def at_most_two_high(self) -> bool:
        return len(self.high_degree_vertices) <= 2

    def __bool__(self) -> bool:
        return self.is_forest


def offhole_forest_check(m: SurfaceMap) -> ForestCheck:
    """Whether the union of all off-hole edges is a forest, and which of
    its vertices carry more than two off-hole edge ends."""
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != x:
            parent[x], x = root, parent[x]
        return root

    is_forest = True
    edges = offhole_edges(m)
    ends: dict[int, int] = {}
    for d, e in edges:
        u, v = m.vertex_of(d), m.vertex_of(e)
        ends[u] = ends.get(u, 0) + 1
        ends[v] = ends.get(v, 0) + 1
        ru, rv = find(u), find(v)
        if ru == rv:
            is_forest = False
        else:
            parent[ru] = rv
    high = tuple(sorted(v for v, n in ends.items() if n > 2))
    return ForestCheck(is_forest, high, len(edges))


def contract_edge(m: SurfaceMap, dart: int) -> SurfaceMap:
    """Contract a non-loop edge, merging its endpoints.

    The two rotations are spliced at the removed darts, which preserves
    every face walk (minus the two darts) and hence the set of faces and
    the Euler characteristic.  Hole markings carry over to the faces of
    the contracted map.
    """
    other = m.pairing[dart]
    u, v = m.vertex_of(dart), m.vertex_of(other)
    if u == v:
        raise ValueError("cannot contract a loop")

    def rest(vertex: int, first: int) -> list[int]:
        rot = list(m.rotations[vertex])
        i = rot.index(first)
        return rot[i + 1 :] + rot[:i]

    merged = tuple(rest(u, dart) + rest(v, other))
    if not merged:
        raise ValueError("contraction would strand a dartless vertex")
    rotations = []
    for w, rot in enumerate(m.rotations):
        if w == u:
            rotations.append(merged)
        elif w != v:
            rotations.append(rot)
    removed = {dart, other}
    pairing = {d: e for d, e in m.pairing.items() if d not in removed}
    labels = {d: l for d, l in m.labels.items() if d not in removed}

    contracted = SurfaceMap(rotations, pairing, labels)
    holes = set()
    for f in m.holes:
        survivor = next((d for d in m.faces[f] if d not in removed), None)
        if survivor is None:
            raise ValueError("contraction would erase a hole face")
        holes.add(contracted.face_of(survivor))
    return SurfaceMap(rotations, pairing, labels, holes)


@dataclass(frozen=True)
class Town:
    """An interior cell of the contracted map, with its exit points.

    ``exits`` lists positions along the boundary walk (indices into
    ``walk``) whose start vertex has degree more than 2; highways attach
    to towns there.  Arc lengths between consecutive exits are measured
    along the boundary walk.
    """

    index: int
    face: int
    walk: tuple[int, ...]
    exits: tuple[int, ...]

    @property
    def perimeter(self) -> int:
        return len(self.walk)

    def arcs(self) -> tuple[int, ...]:
        """Boundary arc lengths between consecutive exits."""
        if not self.exits:
            return ()
        if len(self.exits) == 1:
            return (self.perimeter,)
        ex = self.exits
        return tuple(
            (ex[(i + 1) % len(ex)] - ex[i]) % self.perimeter
            for i in range(len(ex))
        )


# Endpoint of a highway: either an exit of a town or a junction.
TOWN_EXIT = "exit"
JUNCTION = "junction"


@dataclass(frozen=True)
class ModelNode:
    kind: str
    index: int  # town index or junction index
    exit_position: Optional[int] = None  # for town exits: position on walk

    def describe(self) -> str:
        if self.kind == TOWN_EXIT:
            return f"exit of town {self.index} at walk position {self.exit_position}"
        return f"junction {self.index}"


@dataclass(frozen=True)
class Highway:
    """A hole/hole piece of the contracted map, or a zero-length link."""

    index: int
    ends: tuple[ModelNode, ModelNode]
    length: int
    darts: tuple[int, ...] = ()


@dataclass(frozen=True)
class Junction:
    index: int
    vertex: int


@dataclass(frozen=True)
class Model:
    """Towns joined by highways: the skeleton of an annular diagram.

    Produced by contracting every off-hole edge of a one-hole diagram.
    Towns are the interior cells of the contracted map, junctions are
    vertices carrying at least three hole corners, and highways are the
    hole/hole pieces plus the zero-length links created where towns and
    junctions share a vertex.
    """

    map: SurfaceMap
    towns: tuple[Town, ...]
    junctions: tuple[Junction, ...]
    highways: tuple[Highway, ...]
    findings: tuple[str, ...]

    def town_attachments(self, town_index: int) -> int:
        n = 0
        for h in self.highways:
            for end in h.ends:
                if end.kind == TOWN_EXIT and end.index == town_index:
                    n += 1
        return n


def extract_model(m: SurfaceMap) -> Model:
    """Contract all off-hole edges and read off towns and highways."""
    if len(m.holes) != 1:
        raise ValueError("model extraction expects exactly one hole")
    forest = offhole_forest_check(m)
    if not forest.is_forest:
        raise ValueError("off-hole edges contain a cycle; no model exists")

    cur = m
    while True:
        candidates = [d for d, _ in offhole_edges(cur)]
        if not candidates:
            break
        # A forest always has a non-loop edge; contraction keeps it one.
        cur = contract_edge(cur, candidates[0])

    findings: list[str] = []
    towns: list[Town] = []
    town_of_face: dict[int, int] = {}
    for f in cur.interior_faces():
        walk = cur.faces[f]
        exits = tuple(
            i for i, d in enumerate(walk) if cur.degree(cur.vertex_of(d)) > 2
        )
        town_of_face[f] = len(towns)
        towns.append(Town(len(towns), f, walk, exits))

    # Nodes living at each vertex, in rotation order: one exit node per
    # town corner at a vertex of degree > 2, and junction nodes where at
    # least three hole corners meet.  Co-located nodes get chained by
    # zero-length highways; a vertex with four hole corners splits into
    # two junctions joined by one.
    junctions: list[Junction] = []
    nodes_at_vertex: dict[int, list[tuple[int, ModelNode]]] = {}
    junction_of_dart: dict[int, int] = {}
    for v in range(cur.vertex_count):
        rot = cur.rotations[v]
        if len(rot) <= 2:
            continue
        nodes: list[tuple[int, ModelNode]] = []
        hole_positions = [
            i for i, d in enumerate(rot) if cur.is_hole_corner(cur.corner_of(d))
        ]
        for i, d in enumerate(rot):
            corner = cur.corner_of(d)
            f = corner[0]
            if f in cur.holes:
                continue
            town = town_of_face[f]
            position = towns[town].walk.index(d)
            nodes.append((i, ModelNode(TOWN_EXIT, town, position)))
        k = len(hole_positions)
        if k >= 3:
            if k == 3:
                j = Junction(len(junctions), v)
                junctions.append(j)
                node = ModelNode(JUNCTION, j.index)
                nodes.append((hole_positions[0], node))
                for i in hole_positions:
                    junction_of_dart[rot[i]] = j.index
            elif k == 4:
                j1 = Junction(len(junctions), v)
                j2 = Junction(len(junctions) + 1, v)
                junctions.extend([j1, j2])
                nodes.append((hole_positions[0], ModelNode(JUNCTION, j1.index)))
                nodes.append((hole_positions[2], ModelNode(JUNCTION, j2.index)))
                junction_of_dart[rot[hole_positions[0]]] = j1.index
                junction_of_dart[rot[hole_positions[1]]] = j1.index
                junction_of_dart[rot[hole_positions[2]]] = j2.index
                junction_of_dart[rot[hole_positions[3]]] = j2.index
            else:
                findings.append(
                    f"vertex {v} carries {k} hole corners; the model "
                    f"conventions cover at most 4"
                )
                j = Junction(len(junctions), v)
                junctions.append(j)
                nodes.append((hole_positions[0], ModelNode(JUNCTION, j.index)))
                for i in hole_positions:
                    junction_of_dart[rot[i]] = j.index
        nodes.sort(key=lambda item: item[0])
        nodes_at_vertex[v] = nodes

    highways: list[Highway] = []

    def end_node(dart: int) -> ModelNode:
        """The model node a highway end attaches to at its start vertex."""
        v = cur.vertex_of(dart)
        nodes = nodes_at_vertex.get(v, [])
        if dart in junction_of_dart:
            return ModelNode(JUNCTION, junction_of_dart[dart])
        # Otherwise the dart leaves a town exit: the unique town corner
        # node adjacent to it in the rotation.
        rot = cur.rotations[v]
        i = rot.index(dart)
        for step in range(1, len(rot) + 1):
            d2 = rot[(i - step) % len(rot)]
            corner = cur.corner_of(d2)
            if corner[0] not in cur.holes:
                town = town_of_face[corner[0]]
                return ModelNode(TOWN_EXIT, town, towns[town].walk.index(d2))
        raise ValueError(f"no node found for highway end at dart {dart}")

    for piece in pieces(cur):
        f1, f2 = piece_sides(cur, piece)
        if f1 in cur.holes and f2 in cur.holes:
            a = end_node(piece.darts[0])
            b = end_node(cur.pairing[piece.darts[-1]])
            highways.append(Highway(len(highways), (a, b), piece.length, piece.darts))

    for v, nodes in sorted(nodes_at_vertex.items()):
        for (_, a), (_, b) in zip(nodes, nodes[1:]):
            highways.append(Highway(len(highways), (a, b), 0))

    for town in towns:
        attach = sum(
            1
            for h in highways
            for end in h.ends
            if end.kind == TOWN_EXIT and end.index == town.index
        )
        if attach not in (2, 3, 4):
            findings.append(
                f"town {town.index} has {attach} highway attachments; "
                f"expected 2, 3 or 4"
            )

    return Model(cur, tuple(towns), tuple(junctions), tuple(highways), tuple(findings))


TWO_SPECIAL_1 = "two_special1"
ONE_SPECIAL_2 = "one_special2"
SPECIAL_1_PLUS_JUNCTION = "special1_plus_junction"
TWO_JUNCTIONS = "two_junctions"


def model_configuration(model: Model) -> str:
    """Which of the four admissible shapes a model takes.

    A model must contain exactly one of: two 1-special towns, one
    2-special town, one 1-special town plus one junction, or two
    junctions, with every other town ordinary.  Anything else raises.
    """
    special1 = []
    special2 = []
    bad = []
    for town in model.towns:
        attach = model.town_attachments(town.index)
        if attach == 3:
            special1.append(town.index)
        elif attach == 4:
            special2.append(town.index)
        elif attach != 2:
            bad.append((town.index, attach))
    j = len(model.junctions)
    if bad:
        raise ValueError(f"towns with inadmissible attachment counts: {bad}")
    counts = (len(special1), len(special2), j)
    if counts == (2, 0, 0):
        return TWO_SPECIAL_1
    if counts == (0, 1, 0):
        return ONE_SPECIAL_2
    if counts == (1, 0, 1):
        return SPECIAL_1_PLUS_JUNCTION
    if counts == (0, 0, 2):
        return TWO_JUNCTIONS
    raise ValueError(
        f"model matches no admissible configuration: "
        f"{len(special1)} 1-special towns, {len(special2)} 2-special "
        f"towns, {j} junctions"
    )


# -- the one-face torus of a commutator form -------------------------------


def build_wicks_torus(x: Word, y: Word, z: Word) -> SurfaceMap:
    """The one-hole torus whose boundary reads x y z x^-1 y^-1 z^-1.

    The word must be nonempty and cyclically reduced exactly as written
    (no cancellation inside or across the six blocks).  With all three
    words nonempty the skeleton is a theta graph on two vertices; with
    one empty word it degenerates to a wedge of two circles.  Every arc
    is subdivided into unit edges carrying one letter each, and the
    single face is marked as a hole.
    """

    def inv(w: Word) -> list[int]:
        return [-l for l in reversed(w.letters)]

    words = (x, y, z)
    form: list[int] = []
    for w in words:
        form.extend(w.letters)
    for w in words:
        form.extend(inv(w))
    if not form:
        raise ValueError("at least one of x, y, z must be nonempty")
    for i, letter in enumerate(form):
        if letter == -form[(i + 1) % len(form)]:
            raise ValueError(
                "x y z x^-1 y^-1 z^-1 must be cyclically reduced as written"
            )

    rotations: list[list[int]] = []
    pairs: list[tuple[int, int]] = []
    labels: dict[int, int] = {}
    next_dart = 0

    def new_vertex() -> int:
        rotations.append([])
        return len(rotations) - 1

    def new_edge() -> tuple[int, int]:
        nonlocal next_dart
        fwd, bwd = next_dart, next_dart + 1
        next_dart += 2
        pairs.append((fwd, bwd))
        return fwd, bwd

    nonempty = [j for j, w in enumerate(words) if w.letters]
    if len(nonempty) == 3:
        p, q = new_vertex(), new_vertex()
        arc_ends = {0: (p, q), 1: (q, p), 2: (p, q)}
    else:
        v0 = new_vertex()
        arc_ends = {j: (v0, v0) for j in nonempty}

    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for j in nonempty:
        chain = []
        for letter in words[j].letters:
            fwd, bwd = new_edge()
            labels[fwd] = letter
            chain.append((fwd, bwd))
        for (_, b1), (f2, _) in zip(chain, chain[1:]):
            u = new_vertex()
            rotations[u] = [b1, f2]
        first[j] = chain[0][0]
        last[j] = chain[-1][1]

    if len(nonempty) == 3:
        rotations[p] = [first[0], last[1], first[2]]
        rotations[q] = [last[0], first[1], last[2]]
    else:
        j1, j2 = nonempty
        rotations[v0] = [first[j1], last[j2], last[j1], first[j2]]

    m = SurfaceMap(rotations, pairs, labels, holes={0})
    assert m.face_count == 1 and m.euler_characteristic() == 0
    read = m.face_label(0)
    target = tuple(form)
    assert any(
        read[i:] + read[:i] == target for i in range(len(read))
    ), "torus boundary does not read the commutator form"
    return m


def build_one_face_map(w: CyclicWord, n: int = 1) -> SurfaceMap:
    """A labeled map whose single face is a hole reading w^n.

    Write the letters of w^n around a circle, one dart per position, and
    pair the k-th occurrence of each generator with the k-th occurrence
    of its inverse.  Declaring the rotation at each vertex to be
    ``sigma(x) = pair(x) + 1`` makes the face successor the plain shift
    ``d -> d + 1``, so the construction always closes up into exactly one
    face, read in order.  Such a pairing exists precisely when every
    generator has exponent sum zero in w.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    letters = w.letters * n
    if not letters:
        raise ValueError("the empty word bounds no face")
    total = len(letters)

    positions: dict[int, list[int]] = {}
    for i, letter in enumerate(letters):
        positions.setdefault(letter, []).append(i)
    pair: dict[int, int] = {}
    for gen in sorted({abs(letter) for letter in letters}):
        spots = positions.get(gen, [])
        other = positions.get(-gen, [])
        if len(spots) != len(other):
            raise ValueError(
                f"generator {format_letter(gen)} has exponent sum "
                f"{len(spots) - len(other)} in w; a one-face pairing "
                f"needs zero"
            )
        for a, b in zip(spots, other):
            pair[a] = b
            pair[b] = a

    sigma = {x: (pair[x] + 1) % total for x in range(total)}
    rotations: list[tuple[int, ...]] = []
    seen: set[int] = set()
    for start in range(total):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        cur = sigma[start]
        while cur != start:
            cycle.append(cur)
            seen.add(cur)
            cur = sigma[cur]
        rotations.append(tuple(cycle))

    labels = {i: letters[i] for i in range(total)}
    m = SurfaceMap(rotations, pair, labels, holes={0})
    assert m.face_count == 1 and m.face_label(0) == letters
    return m


# -- annular diagrams over a presentation ----------------------------------


@dataclass(frozen=True)
class VanKampenTorusDiagram:
    """A one-hole diagram on the torus over a symmetrized relator set."""

    map: SurfaceMap
    relators: "SymmetrizedSet"
    hole: int


@dataclass(frozen=True)
class DiagramReport:
    ok: bool
    findings: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def validate_diagram(diagram: VanKampenTorusDiagram) -> DiagramReport:
    """Check the structural requirements on an annular torus diagram.

    The underlying map must have Euler characteristic 0 with exactly the
    designated hole, every interior cell must read a relator along its
    boundary exactly as written, and the hole boundary must read a
    cyclically reduced word.
    """
    m = diagram.map
    findings: list[str] = []
    chi = m.euler_characteristic()
    if chi != 0:
        findings.append(f"Euler characteristic is {chi}, expected 0")
    if m.holes != frozenset({diagram.hole}):
        findings.append(
            f"holes are {sorted(m.holes)}, expected exactly {{{diagram.hole}}}"
        )
    for f in m.interior_faces():
        try:
            read = m.face_label(f)
        except ValueError:
            findings.append(f"cell {f} has an unlabeled boundary dart")
            continue
        if not diagram.relators.contains_letters(read):
            findings.append(
                f"cell {f} reads {format_letters(read)}, not a relator"
            )
    if diagram.hole in m.holes:
        try:
            read = m.face_label(diagram.hole)
        except ValueError:
            findings.append("the hole boundary has an unlabeled dart")
        else:
            n = len(read)
            if any(read[i] == -read[(i + 1) % n] for i in range(n)):
                findings.append(
                    f"hole boundary reads {format_letters(read)}, which is "
                    f"not cyclically reduced"
                )
    return DiagramReport(not findings, tuple(findings))


# -- plain text map files ---------------------------------------------------


def parse_map(text: str) -> SurfaceMap:
    """Read a map from its line format.

    Lines (``#`` starts a comment): ``vertex d1 d2 ...`` gives one vertex
    rotation, ``edge d d'`` pairs two darts, ``label d x`` puts the letter
    ``x`` on a dart, and ``hole f`` marks face ``f`` (in traversal order)
    as a hole.
    """
    rotations: list[list[int]] = []
    pairs: list[tuple[int, int]] = []
    labels: dict[int, int] = {}
    holes: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind, args = parts[0], parts[1:]
        try:
            if kind == "vertex":
                rotations.append([int(a) for a in args])
            elif kind == "edge":
                if len(args) != 2:
                    raise ValueError("edge lines take two darts")
                pairs.append((int(args[0]), int(args[1])))
            elif kind == "label":
                if len(args) != 2:
                    raise ValueError("label lines take a dart and a letter")
                letters = parse_letters(args[1])
                if len(letters) != 1:
                    raise ValueError(f"not a single letter: {args[1]!r}")
                labels[int(args[0])] = letters[0]
            elif kind == "hole":
                holes.extend(int(a) for a in args)
            else:
                raise ValueError(f"unknown directive {kind!r}")
        except ValueError as exc:
            raise ValueError(f"map line {lineno}: {exc}") from None
    return SurfaceMap(rotations, pairs, labels, holes)


def load_map(path) -> SurfaceMap:
    return parse_map(Path(path).read_text(encoding="utf-8"))


def dump_map(m: SurfaceMap) -> str:
    lines = []
    for rot in m.rotations:
        lines.append("vertex " + " ".join(str(d) for d in rot))
    for d, e in m.edges():
        lines.append(f"edge {d} {e}")
    for d, e in m.edges():
        if d in m.labels:
            lines.append(f"label {d} {format_letter(m.labels[d])}")
    for f in sorted(m.holes):
        lines.append(f"hole {f}")
    return "\n".join(lines) + "\n"


def save_map(m: SurfaceMap, path) -> None:
    Path(path).write_text(dump_map(m), encoding="utf-8")
