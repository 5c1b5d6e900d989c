"""Numeric recipes for catalog constructions.

Every catalog name has a coordinate recipe in RECIPES; INTERSECT names
additionally have a locus builder in LOCI so two of them sharing an output
can be pinned by intersection.  Recipes draw any free choices from the
supplied rng, so a fixed seed reproduces coordinates exactly.

`locus_of_statement` is the declarative counterpart: it turns a single
statement constraining one unknown point into a locus (or a fixed point),
used when a problem clause does not match any catalog definition.
"""

from __future__ import annotations

import math
from typing import Dict, List, Optional, Tuple, Union

from .errors import NumericallyInfeasible
from .numeric import Circle, Coords, Line, Point, circumcenter, line_line
from .statements import Statement

Locus = Union[Line, Circle]

_TRIES = 64


def _unit(theta: float) -> Point:
    return Point(math.cos(theta), math.sin(theta))


def _rand_point(rng, r: float = 1.0) -> Point:
    return Point(rng.uniform(-r, r), rng.uniform(-r, r))


def _midpoint(a: Point, b: Point) -> Point:
    return Point((a.x + b.x) / 2, (a.y + b.y) / 2)


# ---------------------------------------------------------------------------
# BASIC / BASIC_FREE


def _free(args: List[Point], rng) -> Tuple[Point, ...]:
    return (_rand_point(rng),)


def _segment(args, rng):
    a = _rand_point(rng)
    for _ in range(_TRIES):
        b = _rand_point(rng)
        if a.dist(b) > 0.5:
            return (a, b)
    raise NumericallyInfeasible("segment sampling stalled")


def _triangle(args, rng):
    for _ in range(_TRIES):
        a, b, c = (_rand_point(rng) for _ in range(3))
        if min(a.dist(b), b.dist(c), c.dist(a)) > 0.5 and abs((b - a).cross(c - a)) > 0.25:
            return (a, b, c)
    raise NumericallyInfeasible("triangle sampling stalled")


def _iso_triangle(args, rng):
    a = _rand_point(rng)
    theta = rng.uniform(0.0, 2 * math.pi)
    half = rng.uniform(0.35, 1.2)
    d = rng.uniform(0.5, 1.2)
    return (a, a + _unit(theta + half).scale(d), a + _unit(theta - half).scale(d))


def _r_triangle(args, rng):
    a = _rand_point(rng)
    theta = rng.uniform(0.0, 2 * math.pi)
    b = a + _unit(theta).scale(rng.uniform(0.5, 1.2))
    c = a + _unit(theta + math.pi / 2).scale(rng.uniform(0.5, 1.2))
    return (a, b, c)


def _rectangle(args, rng):
    a = _rand_point(rng)
    theta = rng.uniform(0.0, 2 * math.pi)
    w = rng.uniform(0.5, 1.4)
    h = rng.uniform(0.5, 1.4)
    u, v = _unit(theta), _unit(theta + math.pi / 2)
    return (a, a + u.scale(w), a + u.scale(w) + v.scale(h), a + v.scale(h))


# ---------------------------------------------------------------------------
# INTERSECT: single-locus sampling recipes and locus builders


def _on_line(args, rng):
    a, b = args
    for _ in range(_TRIES):
        t = rng.uniform(-0.8, 1.8)
        if abs(t) > 0.15 and abs(t - 1.0) > 0.15:
            return (a + (b - a).scale(t),)
    raise NumericallyInfeasible("on_line sampling stalled")


def _on_circle(args, rng):
    o, a = args
    r = o.dist(a)
    for _ in range(_TRIES):
        x = o + _unit(rng.uniform(0.0, 2 * math.pi)).scale(r)
        if x.dist(a) > 0.15 * r:
            return (x,)
    raise NumericallyInfeasible("on_circle sampling stalled")


def _on_bline(args, rng):
    a, b = args
    t = rng.uniform(0.2, 1.2) * rng.choice((-1.0, 1.0))
    d = (b - a).rot90()
    return (_midpoint(a, b) + d.scale(t / d.norm()),)


def _on_pline(args, rng):
    a, b, c = args
    t = rng.uniform(0.3, 1.3) * rng.choice((-1.0, 1.0))
    d = c - b
    return (a + d.scale(t / d.norm()),)


def _on_tline(args, rng):
    a, b, c = args
    t = rng.uniform(0.3, 1.3) * rng.choice((-1.0, 1.0))
    d = (c - b).rot90()
    return (a + d.scale(t / d.norm()),)


def _on_dia(args, rng):
    a, b = args
    o = _midpoint(a, b)
    r = a.dist(b) / 2
    for _ in range(_TRIES):
        x = o + _unit(rng.uniform(0.0, 2 * math.pi)).scale(r)
        if x.dist(a) > 0.15 * r and x.dist(b) > 0.15 * r:
            return (x,)
    raise NumericallyInfeasible("on_dia sampling stalled")


def _on_cyclic(args, rng):
    a, b, c = args
    circ = Circle.through(a, b, c)
    for _ in range(_TRIES):
        x = circ.point_at(rng.uniform(0.0, 2 * math.pi))
        if min(x.dist(a), x.dist(b), x.dist(c)) > 0.1 * circ.radius:
            return (x,)
    raise NumericallyInfeasible("on_cyclic sampling stalled")


def _locus_on_line(args) -> Locus:
    return Line(args[0], args[1])


def _locus_on_circle(args) -> Locus:
    return Circle(args[0], args[0].dist(args[1]))


def _locus_on_bline(args) -> Locus:
    a, b = args
    return Line.through(_midpoint(a, b), (b - a).rot90())


def _locus_on_pline(args) -> Locus:
    a, b, c = args
    return Line.through(a, c - b)


def _locus_on_tline(args) -> Locus:
    a, b, c = args
    return Line.through(a, (c - b).rot90())


def _locus_on_dia(args) -> Locus:
    a, b = args
    return Circle(_midpoint(a, b), a.dist(b) / 2)


def _locus_on_cyclic(args) -> Locus:
    return Circle.through(*args)


# ---------------------------------------------------------------------------
# OTHERS: closed-form constructions


def _midpoint_of(args, rng):
    return (_midpoint(args[0], args[1]),)


def _foot(args, rng):
    a, b, c = args
    return (Line(b, c).foot(a),)


def _orthocenter(args, rng):
    a, b, c = args
    alt_a = Line.through(a, (c - b).rot90())
    alt_b = Line.through(b, (c - a).rot90())
    d = alt_a.a * alt_b.b - alt_b.a * alt_a.b
    if abs(d) < 1e-12:
        raise NumericallyInfeasible("altitudes nearly parallel")
    x = (alt_a.b * alt_b.c - alt_b.b * alt_a.c) / d
    y = (alt_b.a * alt_a.c - alt_a.a * alt_b.c) / d
    return (Point(x, y),)


def _circumcenter(args, rng):
    return (circumcenter(*args),)


def _incenter(args, rng):
    a, b, c = args
    la, lb, lc = b.dist(c), a.dist(c), a.dist(b)
    s = la + lb + lc
    return (Point((la * a.x + lb * b.x + lc * c.x) / s, (la * a.y + lb * b.y + lc * c.y) / s),)


def _intersection_ll(args, rng):
    a, b, c, d = args
    return (line_line(Line(a, b), Line(c, d))[0],)


def _reflect(args, rng):
    a, b, c = args
    f = Line(b, c).foot(a)
    return (f + (f - a),)


def _pmirror(args, rng):
    a, b = args
    return (b + (b - a),)


RECIPES: Dict[str, object] = {
    "free": _free,
    "segment": _segment,
    "triangle": _triangle,
    "iso_triangle": _iso_triangle,
    "r_triangle": _r_triangle,
    "rectangle": _rectangle,
    "on_line": _on_line,
    "on_circle": _on_circle,
    "on_bline": _on_bline,
    "on_pline": _on_pline,
    "on_tline": _on_tline,
    "on_dia": _on_dia,
    "on_cyclic": _on_cyclic,
    "midpoint": _midpoint_of,
    "foot": _foot,
    "orthocenter": _orthocenter,
    "circumcenter": _circumcenter,
    "incenter": _incenter,
    "intersection_ll": _intersection_ll,
    "reflect": _reflect,
    "pmirror": _pmirror,
}

LOCI: Dict[str, object] = {
    "on_line": _locus_on_line,
    "on_circle": _locus_on_circle,
    "on_bline": _locus_on_bline,
    "on_pline": _locus_on_pline,
    "on_tline": _locus_on_tline,
    "on_dia": _locus_on_dia,
    "on_cyclic": _locus_on_cyclic,
}


# ---------------------------------------------------------------------------
# declarative fallback: statement -> locus for one unknown point


def _known(coords: Coords, names) -> bool:
    return all(n in coords for n in names)


def locus_of_statement(stmt: Statement, unknown: str, coords: Coords) -> Optional[Union[Locus, Point]]:
    """Locus of `unknown` under `stmt`, all other points being placed.

    Returns a Line, a Circle, a Point (fully determined), or None when the
    statement shape is not supported as a locus.
    """
    p, a = stmt.pred, stmt.args
    if p == "coll" and a.count(unknown) == 1:
        rest = [n for n in a if n != unknown]
        if _known(coords, rest):
            return Line(coords[rest[0]], coords[rest[1]])
        return None
    if p in ("para", "perp"):
        pairs = [(a[0], a[1]), (a[2], a[3])]
        holds = [unknown in pr for pr in pairs]
        if holds == [True, True] and p == "perp":
            # perp x a x b: Thales circle over ab
            others = [n for pr in pairs for n in pr if n != unknown]
            if len(others) == 2 and _known(coords, others) and a.count(unknown) == 2:
                u, v = coords[others[0]], coords[others[1]]
                return Circle(_midpoint(u, v), u.dist(v) / 2)
            return None
        if holds.count(True) != 1:
            return None
        mine = pairs[holds.index(True)]
        other = pairs[1 - holds.index(True)]
        partner = mine[0] if mine[1] == unknown else mine[1]
        if partner == unknown or not _known(coords, (partner,) + other):
            return None
        d = coords[other[1]] - coords[other[0]]
        return Line.through(coords[partner], d if p == "para" else d.rot90())
    if p == "cong":
        pairs = [(a[0], a[1]), (a[2], a[3])]
        holds = [unknown in pr for pr in pairs]
        if holds == [True, True]:
            # cong x a x b: perpendicular bisector of ab
            others = [pr[0] if pr[1] == unknown else pr[1] for pr in pairs]
            if unknown in others or not _known(coords, others):
                return None
            u, v = coords[others[0]], coords[others[1]]
            return Line.through(_midpoint(u, v), (v - u).rot90())
        if holds.count(True) != 1:
            return None
        mine = pairs[holds.index(True)]
        other = pairs[1 - holds.index(True)]
        partner = mine[0] if mine[1] == unknown else mine[1]
        if partner == unknown or not _known(coords, (partner,) + other):
            return None
        return Circle(coords[partner], coords[other[0]].dist(coords[other[1]]))
    if p == "cyclic" and a.count(unknown) == 1:
        rest = [n for n in a if n != unknown]
        if _known(coords, rest):
            return Circle.through(coords[rest[0]], coords[rest[1]], coords[rest[2]])
        return None
    if p == "midp":
        m, u, v = a
        if m == unknown and _known(coords, (u, v)):
            return _midpoint(coords[u], coords[v])
        if v == unknown and _known(coords, (m, u)):
            return coords[m] + (coords[m] - coords[u])
        if u == unknown and _known(coords, (m, v)):
            return coords[m] + (coords[m] - coords[v])
        return None
    if p == "eqangle":
        return _bisector_locus(a, unknown, coords)
    return None


def _bisector_locus(args, unknown: str, coords: Coords) -> Optional[Line]:
    # eqangle v a v x v x v b (up to slot symmetry): angle bisector at v
    from .statements import images

    for img in images(Statement("eqangle", tuple(args))):
        p = img.args
        v, ray1, mid1, mid2, ray2 = p[0], p[1], p[3], p[5], p[7]
        if not (p[2] == p[4] == p[6] == v):
            continue
        if mid1 != unknown or mid2 != unknown or v == unknown:
            continue
        if ray1 == unknown or ray2 == unknown:
            continue
        if not _known(coords, (v, ray1, ray2)):
            continue
        pv = coords[v]
        u1 = coords[ray1] - pv
        u2 = coords[ray2] - pv
        d = u1.scale(1.0 / u1.norm()) + u2.scale(1.0 / u2.norm())
        if d.norm() < 1e-9:
            d = u1.rot90()
        return Line.through(pv, d)
    return None
