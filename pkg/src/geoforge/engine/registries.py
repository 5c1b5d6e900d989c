"""Equivalence structures backing the fact database.

Collinear points collapse into line entries, parallel lines into direction
classes, congruent segments into length classes.  Angle pairs (ordered pairs
of direction roots) and ratio pairs (ordered pairs of length roots) live in
their own union-finds with distinguished classes for the zero angle, the
right angle and the unit ratio.  Every merge remembers the fact id that
caused it, so any equality the structures entail can be explained as a list
of fact ids.
"""

from typing import Callable, Dict, List, Optional, Set, Tuple

Pair = Tuple[int, int]


def _dedup_ids(seq) -> Tuple[int, ...]:
    seen = set()
    out = []
    for x in seq:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return tuple(out)


class ExplainUF:
    """Union-find with a proof forest.

    ``union(x, y, reason)`` records ``reason`` (a fact id, or None for an
    axiomatic merge) on the forest edge between x and y.  ``explain(x, y)``
    returns the reasons along the forest path connecting two elements of the
    same class, x-side first.
    """

    __slots__ = ("parent", "size", "fparent", "freason")

    def __init__(self) -> None:
        self.parent: List[int] = []
        self.size: List[int] = []
        self.fparent: List[int] = []
        self.freason: List[Optional[int]] = []

    def make(self) -> int:
        nid = len(self.parent)
        self.parent.append(nid)
        self.size.append(1)
        self.fparent.append(-1)
        self.freason.append(None)
        return nid

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def _reroot(self, x: int) -> None:
        # Reverse the forest edges along the path from x to its tree root.
        cur, prev, prev_reason = x, -1, None
        while cur != -1:
            nxt = self.fparent[cur]
            rsn = self.freason[cur]
            self.fparent[cur] = prev
            self.freason[cur] = prev_reason
            prev, prev_reason, cur = cur, rsn, nxt

    def union(self, x: int, y: int, reason: Optional[int]) -> Optional[Tuple[int, int]]:
        """Merge the classes of x and y; returns (kept_root, absorbed_root).

        Returns None when the two elements were already equivalent.  The
        larger class keeps its root; ties keep the smaller root id, so the
        result depends only on the operation sequence.
        """
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return None
        if (self.size[rx], -rx) < (self.size[ry], -ry):
            rx, ry = ry, rx
            x, y = y, x
        # rx wins; attach y's forest tree below x
        self._reroot(y)
        self.fparent[y] = x
        self.freason[y] = reason
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        return rx, ry

    def explain(self, x: int, y: int) -> List[int]:
        if self.find(x) != self.find(y):
            raise KeyError("elements are not equivalent")
        up: List[Tuple[int, Optional[int]]] = []
        index: Dict[int, int] = {}
        cur = x
        while cur != -1:
            index[cur] = len(up)
            up.append((cur, self.freason[cur]))
            cur = self.fparent[cur]
        tail: List[Optional[int]] = []
        cur = y
        while cur not in index:
            tail.append(self.freason[cur])
            cur = self.fparent[cur]
        out = [r for (_, r) in up[: index[cur]] if r is not None]
        out.extend(r for r in reversed(tail) if r is not None)
        return out


class PairStructure:
    """Union-find over ordered pairs of base-structure roots.

    Instantiated twice: over direction roots (angle pairs, where the pair
    (d, d) is the zero angle and a second special node marks right angles)
    and over length roots (ratio pairs, where (l, l) is the unit ratio).
    When two base roots merge, every pair node mentioning the absorbed root
    is rekeyed; collisions union with the merging fact as the reason.
    """

    def __init__(self, with_right: bool = False) -> None:
        self.uf = ExplainUF()
        self.zero = self.uf.make()
        self.right = self.uf.make() if with_right else -1
        self.nodes: Dict[Pair, int] = {}
        self.uses: Dict[int, List[Pair]] = {}

    def node(self, a: int, b: int) -> int:
        """Node for the ordered pair of base roots (a, b)."""
        if a == b:
            return self.zero
        key = (a, b)
        nid = self.nodes.get(key)
        if nid is None:
            nid = self.uf.make()
            self.nodes[key] = nid
            self.uses.setdefault(a, []).append(key)
            self.uses.setdefault(b, []).append(key)
        return nid

    def merge(self, n1: int, n2: int, reason: Optional[int]) -> bool:
        return self.uf.union(n1, n2, reason) is not None

    def same(self, n1: int, n2: int) -> bool:
        return self.uf.find(n1) == self.uf.find(n2)

    def on_base_merge(self, kept: int, absorbed: int, reason: Optional[int]) -> None:
        keys = self.uses.pop(absorbed, [])
        for key in keys:
            nid = self.nodes.pop(key, None)
            if nid is None:
                continue
            a, b = key
            na = kept if a == absorbed else a
            nb = kept if b == absorbed else b
            if na == nb:
                self.uf.union(nid, self.zero, reason)
                continue
            newkey = (na, nb)
            other = self.nodes.get(newkey)
            if other is not None:
                self.uf.union(nid, other, reason)
            else:
                self.nodes[newkey] = nid
                self.uses.setdefault(na, []).append(newkey)
                self.uses.setdefault(nb, []).append(newkey)


class LineEntry:
    __slots__ = ("points", "log", "dir")

    def __init__(self, points: Dict[int, Tuple[int, ...]], dir_node: int) -> None:
        self.points = points    # point -> fact ids placing it on this line
        self.log: List[int] = []
        self.dir = dir_node


class LineRegistry:
    """Lines as merged point sets with per-point membership justifications.

    A line entry exists for every point pair that any fact has mentioned
    (two-point implicit lines) and grows through coll facts.  Each point
    carries fact ids that rederive its membership in isolation: founding
    pairs carry none, and a point joining through a coll fact carries that
    fact plus the memberships of the anchor points that tied the fact to the
    line (inherited points add the bridge on both sides of a merge).  Citing
    both endpoints justifies renaming one segment of the line to another.
    """

    def __init__(self, dirs: ExplainUF, merge_dirs: Callable[[int, int, Optional[int]], None]) -> None:
        self.dirs = dirs
        self._merge_dirs = merge_dirs
        self.entries: List[Optional[LineEntry]] = []
        self.pair2line: Dict[Pair, int] = {}

    def _key(self, p: int, q: int) -> Pair:
        return (p, q) if p < q else (q, p)

    def line_id(self, p: int, q: int) -> int:
        """Line through p and q, creating an implicit 2-point line if new."""
        key = self._key(p, q)
        lid = self.pair2line.get(key)
        if lid is None:
            lid = len(self.entries)
            self.entries.append(LineEntry({p: (), q: ()}, self.dirs.make()))
            self.pair2line[key] = lid
        return lid

    def get(self, lid: int) -> LineEntry:
        entry = self.entries[lid]
        assert entry is not None
        return entry

    def find_line(self, points) -> Optional[int]:
        """Registered line containing all given points, if any."""
        pts = list(points)
        lid = self.pair2line.get(self._key(pts[0], pts[1]))
        if lid is None:
            return None
        entry = self.entries[lid]
        if entry is not None and all(p in entry.points for p in pts):
            return lid
        return None

    def add_coll(self, pts: Tuple[int, int, int], fid: int) -> None:
        hit: Dict[int, Pair] = {}
        for i in range(3):
            for j in range(i + 1, 3):
                lid = self.pair2line.get(self._key(pts[i], pts[j]))
                if lid is not None:
                    hit.setdefault(lid, (pts[i], pts[j]))
        if not hit:
            target = len(self.entries)
            self.entries.append(LineEntry({p: (fid,) for p in set(pts)}, self.dirs.make()))
        else:
            target = min(hit)
            entry = self.get(target)
            # a joining point is justified by this fact plus the memberships
            # of the two anchor points that tied the fact to the line, so any
            # membership can be rederived from its own citation alone
            ax, ay = hit[target]
            bridge = entry.points[ax] + entry.points[ay]
            for lid, (ux, uy) in hit.items():
                if lid == target:
                    continue
                dead = self.get(lid)
                extra = _dedup_ids(bridge + dead.points[ux] + dead.points[uy] + (fid,))
                for p, just in dead.points.items():
                    if p not in entry.points:
                        entry.points[p] = _dedup_ids(just + extra)
                entry.log.extend(dead.log)
                self._merge_dirs(entry.dir, dead.dir, fid)
                self.entries[lid] = None
            newjust = _dedup_ids(bridge + (fid,))
            for p in pts:
                if p not in entry.points:
                    entry.points[p] = newjust
        entry = self.get(target)
        entry.log.append(fid)
        ordered = sorted(entry.points)
        for i, p in enumerate(ordered):
            for q in ordered[i + 1:]:
                self.pair2line[self._key(p, q)] = target

    def live(self) -> List[int]:
        return [i for i, e in enumerate(self.entries) if e is not None]


class CircleEntry:
    __slots__ = ("points", "log")

    def __init__(self, points: Set[int]) -> None:
        self.points = points
        self.log: List[int] = []


class CircleRegistry:
    """Circles as merged point sets; two circles sharing 3 points coincide."""

    def __init__(self) -> None:
        self.entries: List[Optional[CircleEntry]] = []

    def find_circle(self, points) -> Optional[CircleEntry]:
        pts = set(points)
        for entry in self.entries:
            if entry is not None and pts <= entry.points:
                return entry
        return None

    def add_cyclic(self, pts: Tuple[int, ...], fid: int) -> None:
        new = set(pts)
        hit = [i for i, e in enumerate(self.entries)
               if e is not None and len(e.points & new) >= 3]
        if not hit:
            target = len(self.entries)
            self.entries.append(CircleEntry(new))
        else:
            target = hit[0]
            entry = self.entries[target]
            assert entry is not None
            for cid in hit[1:]:
                dead = self.entries[cid]
                assert dead is not None
                entry.points |= dead.points
                entry.log.extend(dead.log)
                self.entries[cid] = None
            entry.points |= new
        entry = self.entries[target]
        assert entry is not None
        entry.log.append(fid)

    def live(self) -> List[CircleEntry]:
        return [e for e in self.entries if e is not None]


class SegmentTable:
    """Interns unordered point pairs as segment ids with a length union-find."""

    def __init__(self) -> None:
        self.ids: Dict[Pair, int] = {}
        self.pairs: List[Pair] = []
        self.lengths = ExplainUF()

    def seg_id(self, p: int, q: int) -> int:
        key = (p, q) if p < q else (q, p)
        sid = self.ids.get(key)
        if sid is None:
            sid = self.lengths.make()
            self.ids[key] = sid
            self.pairs.append(key)
        return sid

    def root(self, p: int, q: int) -> int:
        return self.lengths.find(self.seg_id(p, q))
