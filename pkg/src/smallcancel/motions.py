"""Periodic multi-car motions on face boundaries.

A car is an orientation-preserving traversal of the boundary of one face:
it drives around the boundary walk without stops or U-turns.  A multiple
motion of period T puts d >= 1 cars on every face so that consecutive
cars are T-shifted copies of each other and, over one period, the cars
sweep a partition of the boundary into d arcs with disjoint interiors.

Everything here is exact.  Times and positions are Fractions, trajectories
are piecewise-linear lifts, and collision detection solves the linear
crossing equations on each edge instead of sampling.  The same detector
runs on combinatorial maps (every edge has length one) and on the metric
street/highway graphs built from a town model, where a point at distance
x from the start of a dart is the same point as distance (length - x)
from the start of the reversed dart.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Mapping, NamedTuple, Optional, Sequence, Union

from .presentations import ParameterLadder
from .surface_maps import JUNCTION, TOWN_EXIT, Model, SurfaceMap, Town
from .words import CyclicWord, format_letter

Rational = Union[int, Fraction]


# -- trajectories -----------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    """A piecewise-linear lift from one time circle to a boundary lift.

    ``breakpoints`` are (time, position) pairs with strictly increasing
    times running from 0 to ``circle`` (the length of the car's time
    circle, d * T).  Positions are lift coordinates: they advance by the
    boundary length each time the car completes a loop, and evaluation
    outside [0, circle] wraps the time and shifts the position by the
    total advance.  Positions are not validated here, so that defective
    motions can be built and handed to validate_motion.
    """

    circle: Fraction
    breakpoints: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        circle = Fraction(self.circle)
        if circle <= 0:
            raise ValueError("the time circle must have positive length")
        pts = tuple((Fraction(t), Fraction(s)) for t, s in self.breakpoints)
        if len(pts) < 2:
            raise ValueError("a trajectory needs at least two breakpoints")
        if pts[0][0] != 0 or pts[-1][0] != circle:
            raise ValueError("breakpoints must run from time 0 to the circle length")
        for (t0, _), (t1, _) in zip(pts, pts[1:]):
            if t1 <= t0:
                raise ValueError("breakpoint times must strictly increase")
        object.__setattr__(self, "circle", circle)
        object.__setattr__(self, "breakpoints", pts)
        object.__setattr__(self, "_times", tuple(t for t, _ in pts))

    @property
    def advance(self) -> Fraction:
        """Total position gain over one time circle."""
        return self.breakpoints[-1][1] - self.breakpoints[0][1]

    def lift(self, t: Rational) -> Fraction:
        t = Fraction(t)
        loops = t // self.circle
        t -= loops * self.circle
        i = bisect_right(self._times, t) - 1
        if i == len(self.breakpoints) - 1:
            i -= 1
        (t0, s0), (t1, s1) = self.breakpoints[i], self.breakpoints[i + 1]
        return s0 + (s1 - s0) * (t - t0) / (t1 - t0) + loops * self.advance

    def pieces(self) -> list[tuple[Fraction, Fraction, Fraction, Fraction]]:
        """Linear pieces as (t0, t1, s0, s1)."""
        return [
            (t0, t1, s0, s1)
            for (t0, s0), (t1, s1) in zip(self.breakpoints, self.breakpoints[1:])
        ]


def cars_from_master(
    master: Sequence[tuple[Rational, Rational]], d: int, period: Rational
) -> tuple[Trajectory, ...]:
    """The d cars obtained by running one master lift at T-shifts.

    ``master`` describes car 0 over one full time circle [0, d * T]; car
    j is the same function started j * T later.  Cutting every car from
    one lift makes the period-shift condition hold exactly, by
    construction; car 0 reproduces the master verbatim.
    """
    period = Fraction(period)
    circle = d * period
    base = Trajectory(circle, tuple(master))
    cars = []
    for j in range(d):
        shift = j * period
        times = {Fraction(0), circle}
        for t, _ in base.breakpoints:
            times.add((t - shift) % circle)
        grid = sorted(times)
        cars.append(
            Trajectory(circle, tuple((t, base.lift(shift + t)) for t in grid))
        )
    return tuple(cars)


# -- motions ----------------------------------------------------------------


@dataclass(frozen=True)
class DiscreteMotion:
    """A multiple motion: per face, d cars sharing one time circle d * T.

    ``time_resolution`` is the sampling grid (subticks per minute) used
    when validating the shift condition.  By default it is the least
    common multiple of all breakpoint time denominators, which puts every
    breakpoint of every car on the grid and makes the sampled check exact
    rather than approximate.
    """

    period: Fraction
    cars: Mapping[int, tuple[Trajectory, ...]]
    time_resolution: int = 0

    def __post_init__(self) -> None:
        period = Fraction(self.period)
        if period <= 0:
            raise ValueError("the period must be positive")
        cars = {f: tuple(ts) for f, ts in dict(self.cars).items()}
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "cars", cars)
        if self.time_resolution <= 0:
            q = period.denominator
            for ts in cars.values():
                for tr in ts:
                    for t, _ in tr.breakpoints:
                        q = lcm(q, t.denominator)
            object.__setattr__(self, "time_resolution", q)

    def car_ids(self) -> list[tuple[int, int]]:
        return [(f, j) for f in sorted(self.cars) for j in range(len(self.cars[f]))]


@dataclass(frozen=True)
class MotionReport:
    ok: bool
    findings: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def validate_motion(
    m: Union[SurfaceMap, "StreetGraph"], mo: DiscreteMotion
) -> MotionReport:
    """Check the three multiple-motion conditions, exactly.

    Condition 1: every face carries at least one car.  Condition 2: each
    car, run T later, retraces the next car; this is checked on the
    subtick grid, which contains every breakpoint of every car and is
    therefore conclusive for piecewise-linear trajectories.  Condition 3:
    over [0, T] the cars sweep a partition of the boundary into d arcs;
    given the shift condition this reduces to each car advancing exactly
    one boundary length per circle, consecutive arcs chaining, and the
    arc lengths summing to the boundary length, all checked exactly.
    """
    geom = _geometry(m)
    findings: list[str] = []
    T = mo.period
    Q = mo.time_resolution

    for f in sorted(geom.walks):
        if not mo.cars.get(f):
            findings.append(f"face {f} has no car")
    for f in sorted(mo.cars):
        if f not in geom.walks:
            findings.append(f"cars assigned to unknown face {f}")

    for f in sorted(mo.cars):
        if f not in geom.walks:
            continue
        cars = mo.cars[f]
        d = len(cars)
        circle = d * T
        perimeter = geom.perimeter(f)
        ok_shape = True
        for j, car in enumerate(cars):
            if car.circle != circle:
                findings.append(
                    f"car {j} of face {f} runs on a circle of length "
                    f"{car.circle}, expected d*T = {circle}"
                )
                ok_shape = False
                continue
            for (t0, s0), (_, s1) in zip(car.breakpoints, car.breakpoints[1:]):
                if s1 <= s0:
                    findings.append(
                        f"car {j} of face {f} stops or reverses at time {t0}"
                    )
                    break
            if car.advance != perimeter:
                findings.append(
                    f"car {j} of face {f} advances {car.advance} per circle; "
                    f"the boundary has length {perimeter}"
                )
        if not ok_shape:
            continue

        samples = circle * Q
        assert samples.denominator == 1, "resolution must clear the period"
        for j in range(d):
            nxt = cars[(j + 1) % d]
            for k in range(int(samples)):
                t = Fraction(k, Q)
                if (cars[j].lift(t + T) - nxt.lift(t)) % perimeter != 0:
                    findings.append(
                        f"cars {j} and {(j + 1) % d} of face {f} break the "
                        f"period shift at t = {t}"
                    )
                    break

        arcs = [car.lift(T) - car.lift(0) for car in cars]
        if sum(arcs) != perimeter:
            findings.append(
                f"the first-period arcs of face {f} cover {sum(arcs)}; "
                f"the boundary has length {perimeter}"
            )
        for j in range(d):
            if (cars[j].lift(T) - cars[(j + 1) % d].lift(0)) % perimeter != 0:
                findings.append(
                    f"car {j} of face {f} ends its arc away from where "
                    f"car {(j + 1) % d} starts"
                )

    return MotionReport(not findings, tuple(findings))


# -- bus motions ------------------------------------------------------------


def build_bus_motion(m: SurfaceMap, w: CyclicWord, n: int) -> DiscreteMotion:
    """n unit-speed cars on the hole boundary, one w apart.

    The hole boundary must have length n * |w| and read w^n in the walk
    orientation (any rotation).  Car 0 starts where the w^n reading
    starts; the period is |w|, so during the i-th minute every bus drives
    an edge labeled by the i-th letter of w.  On a one-face map this is a
    complete multiple motion; on larger maps it covers the hole face only.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if len(m.holes) != 1:
        raise ValueError("bus motions need exactly one hole face")
    (hole,) = m.holes
    perimeter = len(m.faces[hole])
    target = w.letters * n
    if perimeter != len(target):
        raise ValueError(
            f"hole boundary has length {perimeter}, w^{n} has length {len(target)}"
        )
    read = m.face_label(hole)
    start = None
    best_r, best_match = 0, -1
    for r in range(perimeter):
        rotated = read[r:] + read[:r]
        match = 0
        while match < perimeter and rotated[match] == target[match]:
            match += 1
        if match == perimeter:
            start = r
            break
        if match > best_match:
            best_r, best_match = r, match
    if start is None:
        pos = (best_r + best_match) % perimeter
        raise ValueError(
            f"hole boundary does not read w^{n}: best alignment starts at "
            f"walk position {best_r} and fails at position {pos}, where "
            f"{format_letter(target[best_match])} was expected but "
            f"{format_letter(read[pos])} was read"
        )

    T = Fraction(len(w))
    master = ((Fraction(0), Fraction(start)), (n * T, start + perimeter))
    return DiscreteMotion(T, {hole: cars_from_master(master, n, T)})


def random_motion(
    m: SurfaceMap, cars: Union[int, Mapping[int, int]], rng: random.Random
) -> DiscreteMotion:
    """A random valid multiple motion of period 1.

    Every face gets its car count from ``cars`` (an int applies to all
    faces).  The arcs come from random rational cuts of the boundary, and
    the cars follow a random strictly increasing piecewise-linear master
    lift through the arc endpoints, so the result is valid by
    construction; the tests re-check it with validate_motion anyway.
    """
    T = Fraction(1)
    per_face = {}
    for f in range(m.face_count):
        d = cars if isinstance(cars, int) else cars[f]
        if d < 1:
            raise ValueError("every face needs at least one car")
        per_face[f] = d

    motion_cars: dict[int, tuple[Trajectory, ...]] = {}
    for f, d in per_face.items():
        perimeter = len(m.faces[f])
        cuts = sorted(Fraction(k, 24) for k in rng.sample(range(24 * perimeter), d))
        values = cuts + [cuts[0] + perimeter]
        points: list[tuple[Fraction, Fraction]] = []
        for j in range(d):
            points.append((Fraction(j), values[j]))
            lo, hi = values[j], values[j + 1]
            inner = rng.randrange(0, 3)
            if inner:
                ts = sorted(rng.sample(range(1, 48), inner))
                xs = sorted(rng.sample(range(1, 48), inner))
                for t_num, x_num in zip(ts, xs):
                    points.append(
                        (j + Fraction(t_num, 48), lo + (hi - lo) * Fraction(x_num, 48))
                    )
        points.append((Fraction(d), values[d]))
        motion_cars[f] = cars_from_master(points, d, T)
    return DiscreteMotion(T, motion_cars)


# -- streets ----------------------------------------------------------------


def star_legs(distances: Sequence[Sequence[Rational]]) -> tuple[Fraction, ...]:
    """Leg lengths of a star tree realizing pairwise exit distances.

    ``distances`` is a symmetric k x k matrix (k = 3 or 4).  Leg i is
    computed from its two cyclic neighbours, l_i = (d(i-1, i) + d(i, i+1)
    - d(i-1, i+1)) / 2, which for k = 3 is the classical tree-metric
    formula; negative solutions are clamped to zero and the caller
    re-checks feasibility against its tolerance.
    """
    k = len(distances)
    if k not in (3, 4):
        raise ValueError("star trees are built for 3 or 4 exits")
    legs = []
    for i in range(k):
        a, b = (i - 1) % k, (i + 1) % k
        raw = (
            Fraction(distances[i][a])
            + Fraction(distances[i][b])
            - Fraction(distances[a][b])
        ) / 2
        legs.append(max(raw, Fraction(0)))
    return tuple(legs)


@dataclass(frozen=True)
class StreetTree:
    """The streets of one town: a tree connecting its exits.

    Stored as a star: ``legs[i]`` joins exit i to the hub.  A town with
    two exits has a single street; it is stored as legs (length, 0) and
    the street graph keeps no hub vertex for it.
    """

    town: int
    legs: tuple[Fraction, ...]

    def distance(self, i: int, j: int) -> Fraction:
        if i == j:
            return Fraction(0)
        return self.legs[i] + self.legs[j]


def _exit_distances(arcs: Sequence[int]) -> list[list[Fraction]]:
    """Pairwise exit distances d = min(arc, perimeter - arc)."""
    k = len(arcs)
    perimeter = sum(arcs)
    dist = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        forward = Fraction(0)
        for step in range(1, k):
            forward += arcs[(i + step - 1) % k]
            dist[i][(i + step) % k] = min(forward, perimeter - forward)
    return dist


@dataclass(frozen=True)
class StreetModel:
    """A town model together with the street tree drawn in each town."""

    model: Model
    trees: tuple[StreetTree, ...]
    ladder: ParameterLadder
    findings: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.findings

    def tree_of(self, town_index: int) -> StreetTree:
        return self.trees[town_index]


def build_streets(model: Model, ladder: ParameterLadder) -> StreetModel:
    """Draw a street tree inside every town of the model.

    Two exits get a single street of length min(arc, other arc); three or
    four exits get a star realizing the pairwise boundary distances.  For
    every pair of neighbouring exits the street distance must match the
    boundary arc up to lambda2 times the town perimeter; violations are
    reported as findings, signalling towns that did not come from a
    genuine small-cancellation map.
    """
    trees: list[StreetTree] = []
    findings: list[str] = []
    lam2 = ladder.lambda2
    for town in model.towns:
        k = len(town.exits)
        if k < 2 or k > 4:
            raise ValueError(
                f"town {town.index} has {k} exits; streets are drawn for 2 to 4"
            )
        arcs = town.arcs()
        if k == 2:
            legs = (Fraction(min(arcs)), Fraction(0))
        else:
            legs = star_legs(_exit_distances(arcs))
        tree = StreetTree(town.index, legs)
        trees.append(tree)
        tolerance = lam2 * town.perimeter
        for i in range(k):
            j = (i + 1) % k
            gap = abs(tree.distance(i, j) - arcs[i])
            if gap > tolerance:
                findings.append(
                    f"town {town.index}: exits {i} and {j} lie {arcs[i]} apart "
                    f"along the boundary but {tree.distance(i, j)} apart along "
                    f"the streets; the difference {gap} exceeds the allowance "
                    f"{tolerance}"
                )
    return StreetModel(model, tuple(trees), ladder, tuple(findings))


# -- the street/highway graph and cab motions -------------------------------


@dataclass(frozen=True)
class StreetEdge:
    index: int
    ends: tuple[int, int]
    length: Fraction
    kind: str  # "street", "highway" or "link"


class StreetGraph:
    """The one-cell metric map formed by all streets and highways.

    Vertices are town exits, street hubs and junctions; edges carry exact
    rational lengths.  Zero-length edges are kept (they matter for vertex
    degrees) but have no interior.  ``circuit`` is the boundary walk of
    the single cell, as a sequence of darts 2e / 2e + 1; it is the route
    every cab drives, and each positive-length edge appears in it exactly
    once per direction.
    """

    def __init__(
        self,
        names: Sequence[str],
        edges: Sequence[StreetEdge],
        circuit: Sequence[int],
    ) -> None:
        self.names = tuple(names)
        self.edges = tuple(edges)
        self.circuit = tuple(circuit)
        covered = sorted(self.circuit)
        expected = sorted(
            d
            for e in self.edges
            if e.length > 0
            for d in (2 * e.index, 2 * e.index + 1)
        )
        assert covered == expected, "cab circuit must cover each street once per direction"

    @property
    def vertex_count(self) -> int:
        return len(self.names)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def euler_characteristic(self) -> int:
        return self.vertex_count - self.edge_count + 1

    def dart_length(self, dart: int) -> Fraction:
        return self.edges[dart // 2].length

    def dart_start(self, dart: int) -> int:
        ends = self.edges[dart // 2].ends
        return ends[dart % 2]

    def total_length(self) -> Fraction:
        return sum((e.length for e in self.edges if e.length > 0), Fraction(0))

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"StreetGraph(V={self.vertex_count}, E={self.edge_count}, "
            f"length={self.total_length()})"
        )


class _CabSegment(NamedTuple):
    """One stage of the cab route: a highway or one pass through a town."""

    walk_start: int  # hole-walk position where the paired bus enters
    duration: int  # bus minutes (edges of hole boundary)
    darts: tuple[int, ...]  # street-graph darts driven, zero-length ones elided
    length: Fraction  # street-graph distance covered


def _assemble_streets(sm: StreetModel) -> tuple[StreetGraph, list[_CabSegment]]:
    """Build the street/highway graph and transcribe the cab route."""
    model = sm.model
    m = model.map
    (hole,) = m.holes
    walk = m.faces[hole]
    perimeter = len(walk)

    node_ids: dict[tuple, int] = {}
    names: list[str] = []

    def node(key: tuple, name: str) -> int:
        if key not in node_ids:
            node_ids[key] = len(names)
            names.append(name)
        return node_ids[key]

    edges: list[StreetEdge] = []

    def add_edge(a: int, b: int, length: Fraction, kind: str) -> int:
        edges.append(StreetEdge(len(edges), (a, b), Fraction(length), kind))
        return edges[-1].index

    def exit_node(town: Town, walk_position: int) -> int:
        return node(
            ("exit", town.index, walk_position),
            f"exit of town {town.index} at walk position {walk_position}",
        )

    # Streets: a star per town, or one street for two-exit towns.  The
    # dart from exit i toward the hub is looked up as (town, i, -1), the
    # dart from the hub toward exit j as (town, -1, j).
    street_dart: dict[tuple[int, int, int], int] = {}
    for town, tree in zip(model.towns, sm.trees):
        exits = [exit_node(town, pos) for pos in town.exits]
        if len(exits) == 2:
            e = add_edge(exits[0], exits[1], tree.legs[0] + tree.legs[1], "street")
            street_dart[(town.index, 0, 1)] = 2 * e
            street_dart[(town.index, 1, 0)] = 2 * e + 1
        else:
            hub = node(("hub", town.index), f"street hub of town {town.index}")
            for i, v in enumerate(exits):
                e = add_edge(v, hub, tree.legs[i], "street")
                street_dart[(town.index, i, -1)] = 2 * e
                street_dart[(town.index, -1, i)] = 2 * e + 1

    def model_node(end) -> int:
        if end.kind == TOWN_EXIT:
            return exit_node(model.towns[end.index], end.exit_position)
        assert end.kind == JUNCTION
        return node(("junction", end.index), f"junction {end.index}")

    # Highways, keyed by the first hole dart of each oriented traversal.
    highway_start: dict[int, tuple[int, bool, int]] = {}
    for h in model.highways:
        a, b = model_node(h.ends[0]), model_node(h.ends[1])
        e = add_edge(a, b, Fraction(h.length), "highway" if h.darts else "link")
        if h.darts:
            highway_start[h.darts[0]] = (e, True, len(h.darts))
            highway_start[m.pairing[h.darts[-1]]] = (e, False, len(h.darts))

    town_position: dict[int, tuple[Town, int]] = {
        dart: (t, i) for t in model.towns for i, dart in enumerate(t.walk)
    }

    def breaks_after(i: int) -> bool:
        """Does the bus change segment between walk positions i and i+1?

        Inside one pass through a town the hole walk runs backwards along
        the town walk, one dart at a time; anything else is a boundary.
        """
        here = m.pairing[walk[i % perimeter]]
        nxt = m.pairing[walk[(i + 1) % perimeter]]
        if here not in town_position or nxt not in town_position:
            return True
        t1, p1 = town_position[here]
        t2, p2 = town_position[nxt]
        return t1.index != t2.index or p2 != (p1 - 1) % t1.perimeter

    start = None
    for i, d in enumerate(walk):
        if d in highway_start:
            start = i
            break
        if m.pairing[d] in town_position and breaks_after(i - 1):
            start = i
            break
    if start is None:
        raise ValueError("the cab route never changes segment; streets are malformed")

    segments: list[_CabSegment] = []
    i = start
    consumed = 0
    while consumed < perimeter:
        d = walk[i]
        if d in highway_start:
            e, forward, ndarts = highway_start[d]
            dart = 2 * e + (0 if forward else 1)
            segments.append(_CabSegment(i, ndarts, (dart,), edges[e].length))
            i = (i + ndarts) % perimeter
            consumed += ndarts
            continue
        if m.pairing[d] not in town_position:
            raise ValueError(f"hole dart {d} belongs to no town and no highway")
        town, _ = town_position[m.pairing[d]]
        run = 1
        while run < perimeter and not breaks_after(i + run - 1):
            run += 1
        first = m.pairing[walk[i]]
        last = m.pairing[walk[(i + run - 1) % perimeter]]
        entry_pos = (town_position[first][1] + 1) % town.perimeter
        depart_pos = town_position[last][1]
        try:
            entry = town.exits.index(entry_pos)
            depart = town.exits.index(depart_pos)
        except ValueError:
            raise ValueError(
                f"the bus enters or leaves town {town.index} away from an "
                f"exit; no street leads there"
            ) from None
        tree = sm.trees[town.index]
        length = tree.distance(entry, depart)
        if length == 0:
            raise ValueError(
                f"the street path through town {town.index} from exit {entry} "
                f"to exit {depart} has length 0; a cab cannot spend time on it"
            )
        if len(town.exits) == 2:
            darts = (street_dart[(town.index, entry, depart)],)
        else:
            darts = (
                street_dart[(town.index, entry, -1)],
                street_dart[(town.index, -1, depart)],
            )
        darts = tuple(d2 for d2 in darts if edges[d2 // 2].length > 0)
        segments.append(_CabSegment(i, run, darts, length))
        i = (i + run) % perimeter
        consumed += run

    circuit = tuple(d2 for seg in segments for d2 in seg.darts)
    return StreetGraph(names, edges, circuit), segments


def street_graph(sm: StreetModel) -> StreetGraph:
    """The map formed by all streets and highways (it has one cell)."""
    return _assemble_streets(sm)[0]


def build_cab_motion(sm: StreetModel, buses: DiscreteMotion) -> DiscreteMotion:
    """Cabs: coincide with their bus on highways, cut through towns.

    Each cab rides the street/highway circuit.  Along a highway it copies
    the bus exactly; through a town it takes the unique street path from
    the entry exit to the departure exit at one constant speed, entering
    and leaving exactly when its bus does, so the speed is (street path
    length) / (bus boundary time).  The period is the buses' period and
    the resulting motion lives on face 0 of the street graph.
    """
    model = sm.model
    (hole,) = model.map.holes
    if set(buses.cars) != {hole} or not buses.cars[hole]:
        raise ValueError("the bus motion must live on the model's hole face")
    bus_cars = buses.cars[hole]
    n = len(bus_cars)
    T = buses.period
    perimeter = len(model.map.faces[hole])
    for j, bus in enumerate(bus_cars):
        for t0, t1, s0, s1 in bus.pieces():
            if s1 - s0 != t1 - t0:
                raise ValueError(
                    f"bus {j} is not a unit-speed boundary motion; cabs are "
                    f"built alongside unit-speed buses"
                )

    _, segments = _assemble_streets(sm)

    # Bus 0 sits at walk coordinate r at time 0, so it reaches walk
    # coordinate x at time (x - r) mod perimeter.
    r = bus_cars[0].lift(0) % perimeter
    timed = sorted(
        ((seg.walk_start - r) % perimeter, seg) for seg in segments
    )
    circle = n * T
    t0 = timed[0][0]
    abs_points: list[tuple[Fraction, Fraction]] = [(t0, Fraction(0))]
    t, s = t0, Fraction(0)
    for _, seg in timed:
        t += seg.duration
        s += seg.length
        abs_points.append((t, s))
    total = s
    if t - t0 != circle:
        raise ValueError(
            f"the cab schedule spans {t - t0} minutes per circuit; the bus "
            f"circle is {circle}"
        )

    def at(tau: Fraction) -> Fraction:
        if tau >= t0:
            return _interpolate(abs_points, tau)
        return _interpolate(abs_points, tau + circle) - total

    times = {Fraction(0), circle}
    for bt, _ in abs_points:
        times.add(bt - circle if bt >= circle else bt)
    grid = sorted(tm for tm in times if 0 <= tm <= circle)
    master = tuple((tm, at(tm)) for tm in grid)
    return DiscreteMotion(T, {0: cars_from_master(master, n, T)})


def _interpolate(
    points: Sequence[tuple[Fraction, Fraction]], t: Fraction
) -> Fraction:
    for (t0, s0), (t1, s1) in zip(points, points[1:]):
        if t0 <= t <= t1:
            return s0 + (s1 - s0) * (t - t0) / (t1 - t0)
    raise ValueError(f"time {t} is outside the schedule")


# -- collision detection ----------------------------------------------------


@dataclass(frozen=True)
class CollisionPoint:
    """A point where at least two cars meet, with its meeting times.

    ``kind`` is "edge" or "vertex".  Edge points carry the canonical dart
    of their edge and the offset from that dart's start; vertex points
    carry the vertex id (for street graphs: the metric point obtained by
    shrinking zero-length edges).  The point is complete when
    ``cars_present`` equals ``degree``; edge interiors have degree 2.
    """

    kind: str
    dart: Optional[int]
    offset: Optional[Fraction]
    vertex: Optional[int]
    times: tuple[Fraction, ...]
    cars_present: int
    degree: int
    where: str

    @property
    def complete(self) -> bool:
        return self.cars_present == self.degree


@dataclass(frozen=True)
class CollisionReport:
    points: tuple[CollisionPoint, ...]
    complete_count: int
    bound: int


class _Geometry(NamedTuple):
    """What the detector needs from a map or street graph."""

    walks: dict[int, tuple[int, ...]]
    cum: dict[int, list[Fraction]]
    lengths: dict[int, Fraction]
    pair: dict[int, int]
    cluster_of: dict[int, int]  # dart -> metric point at its start
    degree: dict[int, int]
    chi: int
    vertex_name: dict[int, str]

    def perimeter(self, face: int) -> Fraction:
        return self.cum[face][-1]


def _geometry(m: Union[SurfaceMap, StreetGraph]) -> _Geometry:
    if isinstance(m, SurfaceMap):
        walks = {f: m.faces[f] for f in range(m.face_count)}
        lengths = {d: Fraction(1) for d in m.darts}
        pair = dict(m.pairing)
        cluster_of = {d: m.vertex_of(d) for d in m.darts}
        degree = {v: m.degree(v) for v in range(m.vertex_count)}
        chi = m.euler_characteristic()
        names = {v: f"vertex {v}" for v in range(m.vertex_count)}
    else:
        walks = {0: m.circuit}
        lengths = {}
        pair = {}
        for e in m.edges:
            if e.length > 0:
                lengths[2 * e.index] = e.length
                lengths[2 * e.index + 1] = e.length
                pair[2 * e.index] = 2 * e.index + 1
                pair[2 * e.index + 1] = 2 * e.index

        # Vertices joined by zero-length edges are one metric point.
        parent = list(range(m.vertex_count))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in m.edges:
            if e.length == 0:
                a, b = find(e.ends[0]), find(e.ends[1])
                if a != b:
                    parent[a] = b
        rep = {v: find(v) for v in range(m.vertex_count)}
        cluster_of = {d: rep[m.dart_start(d)] for d in lengths}
        degree = {}
        for e in m.edges:
            if e.length > 0:
                for end in e.ends:
                    degree[rep[end]] = degree.get(rep[end], 0) + 1
        chi = m.euler_characteristic()
        names = {}
        for v in range(m.vertex_count):
            c = rep[v]
            names[c] = m.names[v] if c not in names else names[c] + " / " + m.names[v]

    cum = {}
    for f, walk in walks.items():
        acc = [Fraction(0)]
        for d in walk:
            acc.append(acc[-1] + lengths[d])
        cum[f] = acc
    return _Geometry(walks, cum, lengths, pair, cluster_of, degree, chi, names)


class _Span(NamedTuple):
    """One car crossing one dart: position x(t) from x0 at t0 to x1 at t1."""

    car: tuple[int, int]
    dart: int
    t0: Fraction
    t1: Fraction
    x0: Fraction
    x1: Fraction

    def at(self, t: Fraction) -> Fraction:
        return self.x0 + (self.x1 - self.x0) * (t - self.t0) / (self.t1 - self.t0)


def _cut_pieces(
    geom: _Geometry,
    car_key: tuple[int, int],
    face: int,
    car: Trajectory,
    horizon: Fraction,
    spans: list[_Span],
    arrivals: set[tuple[Fraction, int]],
) -> None:
    """Clip a car to [0, horizon] and slice it at the dart boundaries.

    Emits one span per dart actually driven and one arrival per vertex
    passed, all with exact times.
    """
    walk = geom.walks[face]
    boundaries = geom.cum[face]
    perimeter = boundaries[-1]
    for t0, t1, s0, s1 in car.pieces():
        lo, hi = max(t0, Fraction(0)), min(t1, horizon)
        if lo >= hi:
            continue
        a = s0 + (s1 - s0) * (lo - t0) / (t1 - t0)
        b = s0 + (s1 - s0) * (hi - t0) / (t1 - t0)

        offset = (a // perimeter) * perimeter
        index = bisect_right(boundaries, a - offset) - 1
        if index == len(walk):
            offset += perimeter
            index = 0
        if a - offset == boundaries[index]:
            arrivals.add((lo, geom.cluster_of[walk[index]]))
        t, s = lo, a
        while s < b:
            boundary = offset + boundaries[index + 1]
            s_end = min(b, boundary)
            t_end = hi if s_end == b else lo + (hi - lo) * (s_end - a) / (b - a)
            spans.append(
                _Span(
                    car_key,
                    walk[index],
                    t,
                    t_end,
                    s - offset - boundaries[index],
                    s_end - offset - boundaries[index],
                )
            )
            if s_end == boundary:
                index += 1
                if index == len(walk):
                    index = 0
                    offset += perimeter
                arrivals.add((t_end, geom.cluster_of[walk[index]]))
            t, s = t_end, s_end


def detect_collisions(
    m: Union[SurfaceMap, StreetGraph], mo: DiscreteMotion
) -> CollisionReport:
    """Exact collision detection over one period.

    The car pattern repeats every T (shifting time by T renames car j to
    car j + 1), so scanning t in [0, T) finds every collision point.  Per
    edge, each pair of car crossings yields one linear meeting equation;
    vertex meetings are read off the exact passage times.  Points are
    deduplicated by location and reported in a fixed order: edge points
    by (canonical dart, offset), then vertices by id.
    """
    geom = _geometry(m)
    T = mo.period

    spans: list[_Span] = []
    arrivals: dict[tuple[int, int], set[tuple[Fraction, int]]] = {}
    for f in sorted(mo.cars):
        for j, car in enumerate(mo.cars[f]):
            arrivals[(f, j)] = set()
            _cut_pieces(geom, (f, j), f, car, T, spans, arrivals[(f, j)])

    by_edge: dict[int, list[_Span]] = {}
    for span in spans:
        canon = min(span.dart, geom.pair[span.dart])
        by_edge.setdefault(canon, []).append(span)

    def edge_coord(span: _Span, canon: int, t: Fraction) -> Fraction:
        x = span.at(t)
        return x if span.dart == canon else geom.lengths[canon] - x

    events: dict[tuple, set[Fraction]] = {}
    for canon, group in by_edge.items():
        length = geom.lengths[canon]
        for i in range(len(group)):
            for k in range(i + 1, len(group)):
                a, b = group[i], group[k]
                if a.car == b.car:
                    continue
                lo, hi = max(a.t0, b.t0), min(a.t1, b.t1)
                if lo > hi:
                    continue
                d0 = edge_coord(a, canon, lo) - edge_coord(b, canon, lo)
                d1 = edge_coord(a, canon, hi) - edge_coord(b, canon, hi)
                if d0 == 0 and d1 == 0:
                    # The cars ride together over [lo, hi]; record the two
                    # endpoints of the shared stretch.
                    hits = [lo, hi]
                elif d0 == d1 or (d0 > 0) == (d1 > 0) and d0 != 0 and d1 != 0:
                    continue
                else:
                    hits = [lo + (hi - lo) * d0 / (d0 - d1)]
                for t_star in hits:
                    x = edge_coord(a, canon, t_star)
                    if 0 < x < length and t_star < T:
                        events.setdefault(("edge", canon, x), set()).add(t_star)

    vertex_hits: dict[tuple[Fraction, int], set[tuple[int, int]]] = {}
    for key, hits in arrivals.items():
        for t, cluster in hits:
            if t < T:
                vertex_hits.setdefault((t, cluster), set()).add(key)
    for (t, cluster), cars in vertex_hits.items():
        if len(cars) >= 2:
            events.setdefault(("vertex", cluster), set()).add(t)

    points = []
    for location in sorted(events, key=_location_order):
        times = sorted(events[location])
        if location[0] == "edge":
            _, canon, x = location
            degree = 2
            counted = {
                t: _cars_on_edge(by_edge[canon], geom, canon, x, t) for t in times
            }
            where = f"edge {canon}~{geom.pair[canon]} at {x}"
        else:
            _, cluster = location
            degree = geom.degree[cluster]
            counted = {t: len(vertex_hits[(t, cluster)]) for t in times}
            where = geom.vertex_name[cluster]
        complete_times = tuple(t for t in times if counted[t] == degree)
        if complete_times:
            cars_present: int = degree
            listed = complete_times
        else:
            cars_present = max(counted.values())
            listed = tuple(times)
        if cars_present < 2:
            continue
        points.append(
            CollisionPoint(
                kind=location[0],
                dart=location[1] if location[0] == "edge" else None,
                offset=location[2] if location[0] == "edge" else None,
                vertex=location[1] if location[0] == "vertex" else None,
                times=listed,
                cars_present=cars_present,
                degree=degree,
                where=where,
            )
        )

    complete_count = sum(1 for p in points if p.complete)
    bound = geom.chi + sum(len(cars) - 1 for cars in mo.cars.values())
    return CollisionReport(tuple(points), complete_count, bound)


def _location_order(location: tuple) -> tuple:
    if location[0] == "edge":
        return (0, location[1], location[2])
    return (1, location[1], Fraction(0))


def _cars_on_edge(
    group: Sequence[_Span], geom: _Geometry, canon: int, x: Fraction, t: Fraction
) -> int:
    present = set()
    for span in group:
        if span.t0 <= t <= span.t1:
            coord = span.at(t)
            if span.dart != canon:
                coord = geom.lengths[canon] - coord
            if coord == x:
                present.add(span.car)
    return len(present)


class CarCrashResult(NamedTuple):
    complete_count: int
    bound: int
    satisfied: bool


def carcrash_check(
    m: Union[SurfaceMap, StreetGraph], mo: DiscreteMotion
) -> CarCrashResult:
    """Compare the complete-collision count against chi(S) + sum(d - 1)."""
    report = detect_collisions(m, mo)
    return CarCrashResult(
        report.complete_count, report.bound, report.complete_count >= report.bound
    )


# -- serialization ----------------------------------------------------------


def dump_motion(m: Union[SurfaceMap, StreetGraph], mo: DiscreteMotion) -> str:
    """Delimited rows: car id, breakpoint time, dart, offset."""
    geom = _geometry(m)
    lines = ["car,time,dart,offset"]
    for f, j in mo.car_ids():
        walk = geom.walks[f]
        boundaries = geom.cum[f]
        perimeter = boundaries[-1]
        for t, s in mo.cars[f][j].breakpoints:
            pos = s % perimeter
            index = bisect_right(boundaries, pos) - 1
            if index == len(walk):
                index = 0
                pos = Fraction(0)
            lines.append(f"{f}:{j},{t},{walk[index]},{pos - boundaries[index]}")
    return "\n".join(lines) + "\n"
