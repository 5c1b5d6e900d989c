"""Numeric kernel: coordinates, tolerances, statement evaluation, loci.

All tolerances are absolute on normalized coordinates (figures are rescaled
after building so the centroid sits at the origin and the farthest point at
radius 1).  Line angles are directed angles of undirected lines, i.e. values
mod pi, and the angle between lines l1, l2 is (angle(l2) - angle(l1)) mod pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Tuple

from .errors import DegenerateInput, NumericallyInfeasible
from .statements import Statement

# below this separation two points count as coincident (unit-scale figures)
DEGEN_FLOOR = 1e-9


@dataclass(frozen=True)
class Tolerances:
    """Equality / bucketing / degeneracy thresholds.

    eps_eq   numeric equality of lengths, ratios, angles
    eps_ang  quantization step for angle bucket keys
    eps_deg  degeneracy margin (too-close points, near-zero triangle area)
    """

    eps_eq: float = 1e-6
    eps_ang: float = 1e-7
    eps_deg: float = 1e-4

    def __post_init__(self):
        if not (0 < self.eps_ang < self.eps_eq < self.eps_deg):
            raise ValueError("need 0 < eps_ang < eps_eq < eps_deg")


class Point(NamedTuple):
    x: float
    y: float

    def __add__(self, other):
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Point(self.x - other.x, self.y - other.y)

    def scale(self, k: float) -> "Point":
        return Point(self.x * k, self.y * k)

    def dot(self, other) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other) -> float:
        return self.x * other.y - self.y * other.x

    def dist(self, other) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def rot90(self) -> "Point":
        return Point(-self.y, self.x)


Coords = Dict[str, Point]


def line_angle(p: Point, q: Point) -> float:
    """Direction angle of line pq in [0, pi)."""
    d = q - p
    if d.norm() < DEGEN_FLOOR:
        raise DegenerateInput(f"zero-length line {p} {q}")
    ang = math.atan2(d.y, d.x) % math.pi
    if ang >= math.pi:  # atan2 edge: -0.0 folding
        ang -= math.pi
    return ang


def angle_between(a1: float, a2: float) -> float:
    """(a2 - a1) mod pi."""
    return (a2 - a1) % math.pi


def circ_diff_mod_pi(a: float, b: float) -> float:
    """Distance between two angles on the mod-pi circle."""
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


def orientation(a: Point, b: Point, c: Point) -> float:
    """Signed doubled area of triangle abc."""
    return (b - a).cross(c - a)


def centroid(points: Iterable[Point]) -> Point:
    pts = list(points)
    n = len(pts)
    return Point(sum(p.x for p in pts) / n, sum(p.y for p in pts) / n)


def normalize_coords(coords: Coords) -> Coords:
    """Translate centroid to origin and scale max radius to 1."""
    if not coords:
        return {}
    c = centroid(coords.values())
    shifted = {name: p - c for name, p in coords.items()}
    r = max(p.norm() for p in shifted.values())
    if r < DEGEN_FLOOR:
        return shifted
    return {name: p.scale(1.0 / r) for name, p in shifted.items()}


# ---------------------------------------------------------------------------
# loci


class Line:
    """Line in coefficient form ax + by + c = 0, sign-normalized."""

    def __init__(self, p: Point, q: Point):
        if p.dist(q) < DEGEN_FLOOR:
            raise DegenerateInput("line through coincident points")
        a = q.y - p.y
        b = p.x - q.x
        c = -(a * p.x + b * p.y)
        if a < 0.0 or (a == 0.0 and b < 0.0):
            a, b, c = -a, -b, -c
        n = math.hypot(a, b)
        self.a, self.b, self.c = a / n, b / n, c / n

    @classmethod
    def through(cls, p: Point, direction: Point) -> "Line":
        return cls(p, p + direction)

    def distance(self, p: Point) -> float:
        return abs(self.a * p.x + self.b * p.y + self.c)

    def foot(self, p: Point) -> Point:
        d = self.a * p.x + self.b * p.y + self.c
        return Point(p.x - d * self.a, p.y - d * self.b)

    def point_at(self, t: float) -> Point:
        # parametric point: origin-foot plus t along the direction
        o = self.foot(Point(0.0, 0.0))
        return Point(o.x - self.b * t, o.y + self.a * t)

    def direction(self) -> Point:
        return Point(-self.b, self.a)


class Circle:
    def __init__(self, center: Point, radius: float):
        if radius < DEGEN_FLOOR:
            raise DegenerateInput("circle with near-zero radius")
        self.center = center
        self.radius = radius

    @classmethod
    def through(cls, a: Point, b: Point, c: Point) -> "Circle":
        o = circumcenter(a, b, c)
        return cls(o, o.dist(a))

    def point_at(self, theta: float) -> Point:
        return Point(
            self.center.x + self.radius * math.cos(theta),
            self.center.y + self.radius * math.sin(theta),
        )


def circumcenter(a: Point, b: Point, c: Point) -> Point:
    d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y))
    if abs(d) < DEGEN_FLOOR:
        raise DegenerateInput("circumcenter of collinear points")
    sa, sb, sc = a.dot(a), b.dot(b), c.dot(c)
    x = (sa * (b.y - c.y) + sb * (c.y - a.y) + sc * (a.y - b.y)) / d
    y = (sa * (c.x - b.x) + sb * (a.x - c.x) + sc * (b.x - a.x)) / d
    return Point(x, y)


def line_line(l1: Line, l2: Line) -> List[Point]:
    d = l1.a * l2.b - l2.a * l1.b
    if abs(d) < DEGEN_FLOOR:
        raise NumericallyInfeasible("parallel lines do not intersect")
    x = (l1.b * l2.c - l2.b * l1.c) / d
    y = (l2.a * l1.c - l1.a * l2.c) / d
    return [Point(x, y)]


def line_circle(l: Line, c: Circle) -> List[Point]:
    f = l.foot(c.center)
    h = f.dist(c.center)
    if h > c.radius + DEGEN_FLOOR:
        raise NumericallyInfeasible("line misses circle")
    half = math.sqrt(max(c.radius * c.radius - h * h, 0.0))
    d = l.direction()
    return [Point(f.x + half * d.x, f.y + half * d.y), Point(f.x - half * d.x, f.y - half * d.y)]


def circle_circle(c1: Circle, c2: Circle) -> List[Point]:
    d = c1.center.dist(c2.center)
    if d < DEGEN_FLOOR:
        raise NumericallyInfeasible("concentric circles")
    if d > c1.radius + c2.radius + DEGEN_FLOOR or d < abs(c1.radius - c2.radius) - DEGEN_FLOOR:
        raise NumericallyInfeasible("circles do not intersect")
    a = (c1.radius ** 2 - c2.radius ** 2 + d * d) / (2 * d)
    h2 = c1.radius ** 2 - a * a
    h = math.sqrt(max(h2, 0.0))
    u = (c2.center - c1.center).scale(1.0 / d)
    mid = c1.center + u.scale(a)
    off = u.rot90().scale(h)
    return [mid + off, mid - off]


def intersect(locus1, locus2) -> List[Point]:
    if isinstance(locus1, Line) and isinstance(locus2, Line):
        return line_line(locus1, locus2)
    if isinstance(locus1, Line) and isinstance(locus2, Circle):
        return line_circle(locus1, locus2)
    if isinstance(locus1, Circle) and isinstance(locus2, Line):
        return line_circle(locus2, locus1)
    return circle_circle(locus1, locus2)


# ---------------------------------------------------------------------------
# statement evaluation


def _pt(coords: Coords, name: str) -> Point:
    return coords[name]


def _seg(coords: Coords, a: str, b: str) -> float:
    p, q = coords[a], coords[b]
    d = p.dist(q)
    if d < DEGEN_FLOOR:
        raise DegenerateInput(f"zero-length segment {a} {b}")
    return d


def _ang(coords: Coords, a: str, b: str) -> float:
    return line_angle(coords[a], coords[b])


def _noncollinear(coords: Coords, a: str, b: str, c: str, tol: Tolerances) -> bool:
    return abs(orientation(coords[a], coords[b], coords[c])) > tol.eps_deg


def eval_statement(stmt: Statement, coords: Coords, tol: Tolerances) -> bool:
    """Numeric truth of `stmt` on the figure `coords`.

    Raises DegenerateInput when a line/segment slot has coincident endpoints.
    """
    p, a = stmt.pred, stmt.args
    eq = tol.eps_eq
    if p == "coll":
        x, y, z = (coords[n] for n in a)
        if x.dist(y) < DEGEN_FLOOR:
            raise DegenerateInput("coll with coincident points")
        return Line(x, y).distance(z) < eq
    if p == "para":
        a1, a2 = _ang(coords, a[0], a[1]), _ang(coords, a[2], a[3])
        if circ_diff_mod_pi(a1, a2) >= eq:
            return False
        # coincident lines are collinearity, not parallelism
        return Line(coords[a[0]], coords[a[1]]).distance(coords[a[2]]) > tol.eps_deg
    if p == "perp":
        a1, a2 = _ang(coords, a[0], a[1]), _ang(coords, a[2], a[3])
        return circ_diff_mod_pi(a1, a2 + math.pi / 2) < eq
    if p == "cong":
        return abs(_seg(coords, a[0], a[1]) - _seg(coords, a[2], a[3])) < eq
    if p == "midp":
        m, x, y = (coords[n] for n in a)
        if x.dist(y) < DEGEN_FLOOR:
            raise DegenerateInput("midp of coincident points")
        mid = Point((x.x + y.x) / 2, (x.y + y.y) / 2)
        return m.dist(mid) < eq
    if p == "cyclic":
        w, x, y, z = (coords[n] for n in a)
        try:
            o = circumcenter(w, x, y)
        except DegenerateInput:
            return False
        return abs(o.dist(z) - o.dist(w)) < eq
    if p == "eqangle":
        d1 = angle_between(_ang(coords, a[0], a[1]), _ang(coords, a[2], a[3]))
        d2 = angle_between(_ang(coords, a[4], a[5]), _ang(coords, a[6], a[7]))
        return circ_diff_mod_pi(d1, d2) < eq
    if p == "eqratio":
        ab = _seg(coords, a[0], a[1])
        cd = _seg(coords, a[2], a[3])
        ef = _seg(coords, a[4], a[5])
        gh = _seg(coords, a[6], a[7])
        return abs(ab * gh - cd * ef) < eq
    if p == "aconst":
        d1 = angle_between(_ang(coords, a[0], a[1]), _ang(coords, a[2], a[3]))
        target = (float(stmt.literal) * math.pi / 180.0) % math.pi
        return circ_diff_mod_pi(d1, target) < eq
    if p == "rconst":
        ab = _seg(coords, a[0], a[1])
        cd = _seg(coords, a[2], a[3])
        return abs(ab / cd - float(stmt.literal)) < eq
    if p in ("simtri", "simtrir"):
        if not (_noncollinear(coords, a[0], a[1], a[2], tol) and _noncollinear(coords, a[3], a[4], a[5], tol)):
            return False
        ab, bc, ca = _seg(coords, a[0], a[1]), _seg(coords, a[1], a[2]), _seg(coords, a[2], a[0])
        pq, qr, rp = _seg(coords, a[3], a[4]), _seg(coords, a[4], a[5]), _seg(coords, a[5], a[3])
        if abs(ab * qr - bc * pq) >= eq or abs(bc * rp - ca * qr) >= eq:
            return False
        same = orientation(coords[a[0]], coords[a[1]], coords[a[2]]) * orientation(
            coords[a[3]], coords[a[4]], coords[a[5]]
        ) > 0
        return same if p == "simtri" else not same
    if p in ("contri", "contrir"):
        if not (_noncollinear(coords, a[0], a[1], a[2], tol) and _noncollinear(coords, a[3], a[4], a[5], tol)):
            return False
        for i, j in ((0, 3), (1, 4), (2, 5)):
            k, m = (i + 1) % 3, (j - 3 + 1) % 3 + 3
            if abs(_seg(coords, a[i], a[k]) - _seg(coords, a[j], a[m])) >= eq:
                return False
        same = orientation(coords[a[0]], coords[a[1]], coords[a[2]]) * orientation(
            coords[a[3]], coords[a[4]], coords[a[5]]
        ) > 0
        return same if p == "contri" else not same
    if p == "sameclock":
        s1 = orientation(coords[a[0]], coords[a[1]], coords[a[2]])
        s2 = orientation(coords[a[3]], coords[a[4]], coords[a[5]])
        if abs(s1) < tol.eps_deg or abs(s2) < tol.eps_deg:
            return False
        return (s1 > 0) == (s2 > 0)
    raise ValueError(f"unknown predicate {p!r}")


class AngleValue(NamedTuple):
    """An angle with a stable quantized bucket key."""

    value: float
    key: int

    @classmethod
    def of(cls, value: float, tol: Tolerances) -> "AngleValue":
        v = value % math.pi
        return cls(v, int(round(v / tol.eps_ang)))


def cluster_values(items: List[Tuple[float, object]], eps: float) -> List[List[Tuple[float, object]]]:
    """Group (value, payload) items into maximal runs with consecutive gap < eps.

    Any two values within eps of each other always land in the same cluster,
    so pairwise verification inside clusters reproduces the brute-force
    pairwise relation exactly.
    """
    if not items:
        return []
    ordered = sorted(items, key=lambda it: it[0])
    clusters = [[ordered[0]]]
    for item in ordered[1:]:
        if item[0] - clusters[-1][-1][0] < eps:
            clusters[-1].append(item)
        else:
            clusters.append([item])
    return clusters
