"""Closed pair diagrams D_i u mirror(D_{i+1}) as Morse link words.

The upper tangle keeps its event word; the mirrored lower tangle contributes
its events in reverse with caps turned into cups and crossing over-roles
swapped (reflection across the bridge line fixes slots and keeps the same
geometric strand on top).  The result is a single bottom-to-top word over
{Cup, Cross, Cap} describing a closed link diagram, from which we read
components, crossing signs, writhe, and the checkerboard region structure.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import (
    Cap,
    Crossing,
    Over,
    StructureError,
    TangleDiagram,
    TriPlaneDiagram,
)


class NonUnlinkError(ValueError):
    """A computation found proof that a pair diagram is not an unlink."""


@dataclass(frozen=True)
class ClosedEvent:
    kind: str  # "cup" | "cap" | "cross"
    pos: int
    over: Over | None = None  # for "cross": LEFT = the NE-moving strand is over
    half: str = ""  # "lower" | "upper" provenance
    src_index: int = -1  # event index in the source tangle


@dataclass
class PairCrossing:
    event: int  # index into the closed word
    half: str
    src_index: int
    over: Over
    # strand ids entering from below at slots (pos, pos+1)
    left_in: int = -1
    right_in: int = -1
    sign: int = 0
    # region ids of the four quadrants (W, S, E, N) from the sweep
    quad: tuple[int, int, int, int] | None = None


class PairedDiagram:
    """The closed diagram of tangle i against the mirror of tangle i+1."""

    def __init__(self, triplane: TriPlaneDiagram, index: int):
        if index not in (0, 1, 2):
            raise StructureError("pair index must be 0, 1, or 2")
        self.source = triplane
        self.index = index
        upper = triplane.tangles[index]
        lower = triplane.tangles[(index + 1) % 3]
        self.b = triplane.b
        self.word = _closed_word(upper, lower)
        self._analyze()

    # -- construction -----------------------------------------------------

    def _analyze(self) -> None:
        """Single pass: strand ids, crossing data, bridge-point strands."""

        next_id = 0
        slots: list[int] = []
        self.crossings: list[PairCrossing] = []
        # join[s] = strand glued to s at a cup or cap (same underlying curve)
        joins: list[tuple[int, int]] = []
        # per strand id: the event (index, role) where it was born
        self.bridge_strands: list[int] = []  # strand id at slot k when word crosses bridge
        seen_bridge = False
        for ei, ev in enumerate(self.word):
            if ev.kind == "bridge":
                self.bridge_strands = list(slots)
                seen_bridge = True
                continue
            k = ev.pos
            if ev.kind == "cup":
                a, b = next_id, next_id + 1
                next_id += 2
                joins.append((a, b))
                slots[k - 1 : k - 1] = [a, b]
            elif ev.kind == "cross":
                c = PairCrossing(ei, ev.half, ev.src_index, ev.over)
                c.left_in = slots[k - 1]
                c.right_in = slots[k]
                self.crossings.append(c)
                slots[k - 1], slots[k] = slots[k], slots[k - 1]
            else:  # cap
                joins.append((slots[k - 1], slots[k]))
                del slots[k - 1 : k + 1]
        if slots or not seen_bridge:
            raise StructureError("malformed closed word")
        self.strand_count = next_id

        # components: strands glued at cups and caps
        parent = list(range(next_id))

        def root(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in joins:
            ra, rb = root(a), root(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        comp_of: dict[int, int] = {}
        for s in range(next_id):
            comp_of.setdefault(root(s), len(comp_of))
        self.component_of = [comp_of[root(s)] for s in range(next_id)]
        self.components = len(comp_of)

        # canonical orientation: per component, the lowest-index bridge slot
        # is directed "upward into the upper tangle"; propagate along joins.
        # up[s] == True means strand s is traversed in its ascending direction.
        self._orient_components(joins)
        for c in self.crossings:
            c.sign = self._crossing_sign(c)

    def _orient_components(self, joins: list[tuple[int, int]]) -> None:
        # adjacency: each strand has exactly two joins (birth and death)
        adj: dict[int, list[int]] = {s: [] for s in range(self.strand_count)}
        for a, b in joins:
            adj[a].append(b)
            adj[b].append(a)
        up = [None] * self.strand_count
        # seed components by lowest bridge slot
        comp_seed: dict[int, int] = {}
        for slot_index, s in enumerate(self.bridge_strands):
            comp = self.component_of[s]
            if comp not in comp_seed:
                comp_seed[comp] = slot_index
                up[s] = True  # heads up into the upper tangle
        # joins flip ascent: at a cap or cup the partner strand descends
        stack = [s for s in range(self.strand_count) if up[s] is not None]
        while stack:
            s = stack.pop()
            for t in adj[s]:
                if up[t] is None:
                    up[t] = not up[s]
                    stack.append(t)
        if any(v is None for v in up):
            raise StructureError("disconnected strand bookkeeping")
        self.up = up

    def _crossing_sign(self, c: PairCrossing) -> int:
        # Geometric ascent directions: left-in strand moves NE, right-in NW.
        # det(v_over, v_under) > 0 is positive.
        ne = (1, 1)
        nw = (-1, 1)

        def vec(base, ascending):
            return base if ascending else (-base[0], -base[1])

        v_left = vec(ne, self.up[c.left_in])
        v_right = vec(nw, self.up[c.right_in])
        if c.over is Over.LEFT:
            vo, vu = v_left, v_right
        else:
            vo, vu = v_right, v_left
        det = vo[0] * vu[1] - vo[1] * vu[0]
        return 1 if det > 0 else -1

    # -- invariants --------------------------------------------------------

    def link_components(self) -> int:
        return self.components

    def crossing_count(self) -> int:
        return len(self.crossings)

    def inter_component_sums(self) -> dict[tuple[int, int], int]:
        sums: dict[tuple[int, int], int] = {}
        for c in self.crossings:
            ca = self.component_of[c.left_in]
            cb = self.component_of[c.right_in]
            if ca != cb:
                key = (min(ca, cb), max(ca, cb))
                sums[key] = sums.get(key, 0) + c.sign
        return sums

    def writhe(self, strict: bool = True) -> int:
        """Sum of crossing signs under the canonical orientation.

        With ``strict`` the pairwise inter-component signed sums must vanish
        (they do for any unlink diagram), which makes the writhe independent
        of component orientations; a violation proves the diagram is not an
        unlink and raises NonUnlinkError.
        """

        if strict:
            for (a, b), s in self.inter_component_sums().items():
                if s != 0:
                    raise NonUnlinkError(
                        f"components {a} and {b} have nonzero signed "
                        f"crossing sum {s} (linking number {s // 2})"
                    )
        return sum(c.sign for c in self.crossings)

    def self_writhe_by_strand_class(self, strand_class) -> dict[int, int]:
        """Signed sums of crossings both of whose strands map to one class.

        ``strand_class(strand_id)`` assigns each strand a label; crossings
        whose two strands share a label are summed per label.
        """

        sums: dict[int, int] = {}
        for c in self.crossings:
            ka = strand_class(c.left_in)
            kb = strand_class(c.right_in)
            if ka == kb:
                sums[ka] = sums.get(ka, 0) + c.sign
        return sums

    # -- checkerboard regions ----------------------------------------------

    def region_data(self) -> "RegionData":
        return _sweep_regions(self)

    # -- bridge correspondence ----------------------------------------------

    def strand_surface_component(self, surface_partition: list[list[int]]) -> list[int]:
        """Map each strand id to a surface-component index.

        ``surface_partition`` is diagram-core's bridge point partition for
        the owning tri-plane diagram.
        """

        comp_index = {}
        for i, grp in enumerate(surface_partition):
            for p in grp:
                comp_index[p] = i
        # bridge slot k (1-based) = bridge point k; propagate along components
        strand_comp = [-1] * self.strand_count
        for slot_index, s in enumerate(self.bridge_strands):
            strand_comp[s] = comp_index[slot_index + 1]
        # all strands in a link component share the point set of that
        # component, so propagate by link component
        by_link: dict[int, int] = {}
        for s in range(self.strand_count):
            if strand_comp[s] >= 0:
                by_link[self.component_of[s]] = strand_comp[s]
        for s in range(self.strand_count):
            strand_comp[s] = by_link[self.component_of[s]]
        return strand_comp


def _closed_word(upper: TangleDiagram, lower: TangleDiagram) -> list[ClosedEvent]:
    word: list[ClosedEvent] = []
    for ri, ev in enumerate(reversed(lower.events)):
        i = len(lower.events) - 1 - ri
        if isinstance(ev, Cap):
            word.append(ClosedEvent("cup", ev.pos, None, "lower", i))
        else:
            word.append(
                ClosedEvent("cross", ev.pos, ev.over.flipped(), "lower", i)
            )
    word.append(ClosedEvent("bridge", 0, None, "", -1))
    for i, ev in enumerate(upper.events):
        if isinstance(ev, Cap):
            word.append(ClosedEvent("cap", ev.pos, None, "upper", i))
        else:
            word.append(ClosedEvent("cross", ev.pos, ev.over, "upper", i))
    return word


def pair(triplane: TriPlaneDiagram, index: int) -> PairedDiagram:
    """The closed diagram of tangle ``index`` against mirror(tangle index+1)."""

    return PairedDiagram(triplane, index)


def link_components(paired: PairedDiagram) -> int:
    return paired.link_components()


@dataclass
class RegionData:
    """Plane regions of a pair diagram with checkerboard structure.

    Regions carry the parity shading: a region's color is the parity of the
    number of strands to its left at any height (0 = unshaded; the unbounded
    region is 0).  Each crossing records its four quadrant regions.
    """

    region_count: int
    shading: list[int]  # 0/1 per region id
    outer: int
    # per crossing (same order as paired.crossings): (W, S, E, N) region ids
    quadrants: list[tuple[int, int, int, int]]


def _sweep_regions(paired: PairedDiagram) -> RegionData:
    parent: list[int] = []
    parity: list[int] = []

    def new_region(par: int) -> int:
        parent.append(len(parent))
        parity.append(par)
        return len(parent) - 1

    def root(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = root(a), root(b)
        if ra != rb:
            if parity[ra] != parity[rb]:
                raise StructureError("checkerboard parity clash")
            parent[max(ra, rb)] = min(ra, rb)

    outer = new_region(0)
    intervals = [outer]  # region ids between consecutive strands
    quadrants: list[tuple[int, int, int, int]] = []
    for ev in paired.word:
        if ev.kind == "bridge":
            continue
        k = ev.pos
        if ev.kind == "cup":
            inner = new_region(parity[root(intervals[k - 1])] ^ 1)
            intervals[k : k] = [inner, intervals[k - 1]]
        elif ev.kind == "cross":
            w = intervals[k - 1]
            s = intervals[k]
            e = intervals[k + 1]
            n = new_region(parity[root(s)])
            intervals[k] = n
            quadrants.append((w, s, e, n))
        else:  # cap
            union(intervals[k - 1], intervals[k + 1])
            del intervals[k - 1 : k + 1]
    assert len(intervals) == 1
    union(intervals[0], outer)

    # compress to canonical ids
    reps: dict[int, int] = {}
    for r in range(len(parent)):
        reps.setdefault(root(r), len(reps))
    shading = [0] * len(reps)
    for r in range(len(parent)):
        shading[reps[root(r)]] = parity[root(r)]
    quads = [
        tuple(reps[root(q)] for q in quad)  # type: ignore[misc]
        for quad in quadrants
    ]
    return RegionData(len(reps), shading, reps[root(outer)], quads)
