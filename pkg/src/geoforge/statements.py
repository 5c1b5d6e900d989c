"""Geometric statements and their canonical forms.

A statement is a predicate applied to named points, e.g.
``perp a b f e`` ("line ab is perpendicular to line fe").  aconst/rconst
additionally carry an exact rational literal (degrees / ratio).

Most predicates admit argument symmetries (a statement and its image say the
same thing); `canonicalize` picks the lexicographically least image so that
equal statements compare equal.  The symmetry groups are:

  coll        any permutation of the 3 points
  cyclic      any permutation of the 4 points
  para/perp/  swap the two points inside either pair, swap the two pairs
  cong
  midp        swap the two endpoints (the midpoint slot is fixed)
  eqangle     swap points inside each line pair; swap the two sides of both
              angles simultaneously; swap the two angles
  eqratio     same shape as eqangle over segment pairs
  aconst      swap points inside each pair; swapping the pairs maps the
              angle literal t to 180 - t (mod 180)
  rconst      swap points inside each pair; swapping the pairs inverts the
              ratio literal
  simtri(r)/  simultaneous vertex permutation of both triangles, swap of the
  contri(r)   two triangles
  sameclock   cyclic rotation of either triple, reversal of both triples
              simultaneously, swap of the two triples
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator, NamedTuple, Optional

# predicate name -> number of point arguments
PREDICATES = {
    "coll": 3,
    "para": 4,
    "perp": 4,
    "cong": 4,
    "midp": 3,
    "cyclic": 4,
    "eqangle": 8,
    "eqratio": 8,
    "aconst": 4,
    "rconst": 4,
    "simtri": 6,
    "simtrir": 6,
    "contri": 6,
    "contrir": 6,
    "sameclock": 6,
}

# predicates whose last token is an exact rational literal
LITERAL_PREDICATES = ("aconst", "rconst")

# 8-ary predicates read as two pairs-of-pairs
PAIR_PREDICATES = ("eqangle", "eqratio")

TRIANGLE_PREDICATES = ("simtri", "simtrir", "contri", "contrir")


class Statement(NamedTuple):
    pred: str
    args: tuple
    literal: Optional[Fraction] = None

    def __str__(self) -> str:
        text = " ".join((self.pred,) + self.args)
        if self.literal is not None:
            lit = self.literal
            text += f" {lit.numerator}/{lit.denominator}" if lit.denominator != 1 else f" {lit.numerator}"
        return text


def parse_literal(token: str) -> Fraction:
    if "/" in token:
        num, den = token.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(token))


def _pair(a: str, b: str) -> tuple:
    return (a, b) if a <= b else (b, a)


def _pair_images(p1: tuple, p2: tuple, p3: tuple, p4: tuple) -> Iterator[tuple]:
    # swap both sides simultaneously, swap the two angles/ratios
    yield p1 + p2 + p3 + p4
    yield p2 + p1 + p4 + p3
    yield p3 + p4 + p1 + p2
    yield p4 + p3 + p2 + p1


_TRIANGLE_PERMS = ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))
_ROTS = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


def canonicalize(stmt: Statement) -> Statement:
    """Return the canonical (lexicographically least) image of `stmt`."""
    pred, args = stmt.pred, stmt.args
    if pred == "coll":
        return Statement(pred, tuple(sorted(args)))
    if pred == "cyclic":
        return Statement(pred, tuple(sorted(args)))
    if pred in ("para", "perp", "cong"):
        p1 = _pair(args[0], args[1])
        p2 = _pair(args[2], args[3])
        return Statement(pred, min(p1 + p2, p2 + p1))
    if pred == "midp":
        return Statement(pred, (args[0],) + _pair(args[1], args[2]))
    if pred in PAIR_PREDICATES:
        pairs = [_pair(args[i], args[i + 1]) for i in (0, 2, 4, 6)]
        return Statement(pred, min(_pair_images(*pairs)))
    if pred == "aconst":
        p1 = _pair(args[0], args[1])
        p2 = _pair(args[2], args[3])
        lit = stmt.literal % 180
        if p2 + p1 < p1 + p2:
            return Statement(pred, p2 + p1, (180 - lit) % 180)
        return Statement(pred, p1 + p2, lit)
    if pred == "rconst":
        p1 = _pair(args[0], args[1])
        p2 = _pair(args[2], args[3])
        if p2 + p1 < p1 + p2:
            return Statement(pred, p2 + p1, 1 / stmt.literal)
        return Statement(pred, p1 + p2, stmt.literal)
    if pred in TRIANGLE_PREDICATES:
        t1, t2 = args[:3], args[3:]
        best = None
        for a, b in ((t1, t2), (t2, t1)):
            for perm in _TRIANGLE_PERMS:
                image = tuple(a[i] for i in perm) + tuple(b[i] for i in perm)
                if best is None or image < best:
                    best = image
        return Statement(pred, best)
    if pred == "sameclock":
        t1, t2 = args[:3], args[3:]
        best = None
        for a, b in ((t1, t2), (t2, t1)):
            for flip in (False, True):
                u = tuple(reversed(a)) if flip else a
                v = tuple(reversed(b)) if flip else b
                for r1 in _ROTS:
                    iu = tuple(u[i] for i in r1)
                    for r2 in _ROTS:
                        image = iu + tuple(v[i] for i in r2)
                        if best is None or image < best:
                            best = image
        return Statement(pred, best)
    raise ValueError(f"unknown predicate {pred!r}")


def _perms3(t: tuple) -> Iterator[tuple]:
    for p in _TRIANGLE_PERMS:
        yield tuple(t[i] for i in p)


def images(stmt: Statement) -> Iterator[Statement]:
    """All symmetry images of `stmt`, including within-pair point swaps.

    canonicalize(s) equals min(images(s)); unlike canonicalize this keeps
    the full group, which template unification needs (a template may bind
    either point of a pair to either slot).
    """
    pred, args = stmt.pred, stmt.args
    if pred == "coll":
        for t in _perms3(args):
            yield Statement(pred, t)
        return
    if pred == "cyclic":
        for t1 in _perms3(args[:3]):
            for i in range(4):
                yield Statement(pred, t1[:i] + (args[3],) + t1[i:])
        return
    if pred in ("para", "perp", "cong"):
        for p1 in ((args[0], args[1]), (args[1], args[0])):
            for p2 in ((args[2], args[3]), (args[3], args[2])):
                yield Statement(pred, p1 + p2)
                yield Statement(pred, p2 + p1)
        return
    if pred == "midp":
        yield stmt
        yield Statement(pred, (args[0], args[2], args[1]))
        return
    if pred in PAIR_PREDICATES:
        base = [(args[i], args[i + 1]) for i in (0, 2, 4, 6)]
        for bits in range(16):
            ps = [base[k] if not bits >> k & 1 else base[k][::-1] for k in range(4)]
            for img in _pair_images(*ps):
                yield Statement(pred, img)
        return
    if pred == "aconst":
        for p1 in ((args[0], args[1]), (args[1], args[0])):
            for p2 in ((args[2], args[3]), (args[3], args[2])):
                yield Statement(pred, p1 + p2, stmt.literal % 180)
                yield Statement(pred, p2 + p1, (180 - stmt.literal) % 180)
        return
    if pred == "rconst":
        for p1 in ((args[0], args[1]), (args[1], args[0])):
            for p2 in ((args[2], args[3]), (args[3], args[2])):
                yield Statement(pred, p1 + p2, stmt.literal)
                yield Statement(pred, p2 + p1, 1 / stmt.literal)
        return
    if pred in TRIANGLE_PREDICATES:
        t1, t2 = args[:3], args[3:]
        for a, b in ((t1, t2), (t2, t1)):
            for perm in _TRIANGLE_PERMS:
                yield Statement(pred, tuple(a[i] for i in perm) + tuple(b[i] for i in perm))
        return
    if pred == "sameclock":
        t1, t2 = args[:3], args[3:]
        for a, b in ((t1, t2), (t2, t1)):
            for flip in (False, True):
                u = tuple(reversed(a)) if flip else a
                v = tuple(reversed(b)) if flip else b
                for r1 in _ROTS:
                    iu = tuple(u[i] for i in r1)
                    for r2 in _ROTS:
                        yield Statement(pred, iu + tuple(v[i] for i in r2))
        return
    raise ValueError(f"unknown predicate {pred!r}")


def statement_points(stmt: Statement) -> tuple:
    """Distinct point names in argument order."""
    seen = []
    for a in stmt.args:
        if a not in seen:
            seen.append(a)
    return tuple(seen)
