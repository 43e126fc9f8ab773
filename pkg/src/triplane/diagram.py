"""Core combinatorial model: trivial tangle diagrams and tri-plane diagrams.

A tangle diagram is a bottom-to-top Morse event word on 2b strands with only
crossings and caps (no cups).  Every arc therefore has exactly one maximum,
which forces the tangle to be trivial.  A tri-plane diagram is a triple of
such tangles with a common bridge number.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class StructureError(ValueError):
    """A tangle or tri-plane diagram violates a structural invariant."""


class Over(Enum):
    LEFT = "+"
    RIGHT = "-"

    def flipped(self) -> "Over":
        return Over.RIGHT if self is Over.LEFT else Over.LEFT


@dataclass(frozen=True)
class Crossing:
    """Strands in slots ``pos`` and ``pos+1`` cross.

    ``over`` names the strand that passes in front: LEFT is the strand
    entering from slot ``pos`` (it exits at ``pos+1``, heading up-right).
    """

    pos: int
    over: Over

    def __str__(self) -> str:
        return f"X{self.pos}{self.over.value}"


@dataclass(frozen=True)
class Cap:
    """Strands in slots ``pos`` and ``pos+1`` join in a maximum and vanish."""

    pos: int

    def __str__(self) -> str:
        return f"^{self.pos}"


TangleEvent = Crossing | Cap


def parse_event(token: str) -> TangleEvent:
    if token.startswith("^"):
        return Cap(int(token[1:]))
    if token.startswith("X"):
        body = token[1:]
        if body.endswith("+"):
            return Crossing(int(body[:-1]), Over.LEFT)
        if body.endswith("-"):
            return Crossing(int(body[:-1]), Over.RIGHT)
    raise StructureError(f"unrecognized event token {token!r}")


@dataclass(frozen=True)
class Arc:
    """One arc of a tangle: joins two distinct bridge points through one cap."""

    ends: tuple[int, int]  # bridge point indices, 1-based, ends[0] < ends[1]

    def other(self, p: int) -> int:
        a, b = self.ends
        return b if p == a else a


class TangleDiagram:
    """A trivial b-strand tangle as a validated Morse event word."""

    def __init__(self, bridge_number: int, events: list[TangleEvent]):
        if bridge_number < 1:
            raise StructureError("bridge number must be positive")
        self.bridge_number = bridge_number
        self.events = tuple(events)
        self.arcs: tuple[Arc, ...] = tuple(self._validate())

    def _validate(self) -> list[Arc]:
        b = self.bridge_number
        # slots[i] = bridge point whose strand currently occupies slot i+1
        slots = list(range(1, 2 * b + 1))
        arcs = []
        for i, ev in enumerate(self.events):
            k = ev.pos
            if k < 1 or k + 1 > len(slots):
                raise StructureError(
                    f"event {i} ({ev}) uses slot {k}: only {len(slots)} strands live"
                )
            if isinstance(ev, Crossing):
                slots[k - 1], slots[k] = slots[k], slots[k - 1]
            else:
                p, q = slots[k - 1], slots[k]
                arcs.append(Arc((min(p, q), max(p, q))))
                del slots[k - 1 : k + 1]
        if slots:
            raise StructureError(
                f"{len(slots)} strands left uncapped (need exactly {b} caps)"
            )
        return arcs

    @property
    def crossings(self) -> int:
        return sum(1 for e in self.events if isinstance(e, Crossing))

    def arc_of(self, bridge_point: int) -> Arc:
        for a in self.arcs:
            if bridge_point in a.ends:
                return a
        raise KeyError(bridge_point)

    def matching(self) -> frozenset[tuple[int, int]]:
        return frozenset(a.ends for a in self.arcs)

    def word(self) -> str:
        return " ".join(str(e) for e in self.events)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TangleDiagram)
            and self.bridge_number == other.bridge_number
            and self.events == other.events
        )

    def __hash__(self) -> int:
        return hash((self.bridge_number, self.events))

    def __repr__(self) -> str:
        return f"TangleDiagram(b={self.bridge_number}, [{self.word()}])"


def tangle_from_word(b: int, word: str) -> TangleDiagram:
    tokens = word.split()
    return TangleDiagram(b, [parse_event(t) for t in tokens])


@dataclass(frozen=True)
class UncrossingCertificate:
    """Witness that a paired diagram is an unlink diagram.

    ``moves`` replay from the paired diagram to a crossingless one.
    ``ri_pos``/``ri_neg`` count RI moves removing a positive/negative
    crossing; their difference equals the starting writhe.  (The paper
    calls an RI move positive when it *cancels a negative* crossing, so
    its n - p equals our ri_pos - ri_neg.)
    """

    moves: tuple = ()
    ri_pos: int = 0
    ri_neg: int = 0
    rii: int = 0
    riii: int = 0

    @property
    def branch_sum(self) -> int:
        return self.ri_pos - self.ri_neg


@dataclass(frozen=True)
class CertifiedUnlink:
    components: int
    certificate: UncrossingCertificate


@dataclass(frozen=True)
class Unverified:
    reason: str = "not attempted"


@dataclass(frozen=True)
class ProvedNonUnlink:
    reason: str


PairStatus = CertifiedUnlink | Unverified | ProvedNonUnlink


class TriPlaneDiagram:
    """Three tangles with common bridge number, plus pair certification."""

    def __init__(
        self,
        tangles: tuple[TangleDiagram, TangleDiagram, TangleDiagram],
        certification: tuple[PairStatus, PairStatus, PairStatus] | None = None,
    ):
        if len(tangles) != 3:
            raise StructureError("need exactly three tangles")
        b = tangles[0].bridge_number
        if any(t.bridge_number != b for t in tangles):
            raise StructureError("tangles must share one bridge number")
        self.tangles = tuple(tangles)
        self.b = b
        self.certification = certification or (Unverified(), Unverified(), Unverified())

    def with_certification(self, cert: tuple[PairStatus, PairStatus, PairStatus]):
        return TriPlaneDiagram(self.tangles, cert)

    def certified_counts(self) -> tuple[int, int, int]:
        cs = []
        for i, st in enumerate(self.certification):
            if not isinstance(st, CertifiedUnlink):
                raise StructureError(
                    f"pair {i + 1} is not certified as an unlink ({st})"
                )
            cs.append(st.components)
        return tuple(cs)

    @property
    def all_certified(self) -> bool:
        return all(isinstance(s, CertifiedUnlink) for s in self.certification)

    def __eq__(self, other) -> bool:
        return isinstance(other, TriPlaneDiagram) and self.tangles == other.tangles

    def __hash__(self) -> int:
        return hash(self.tangles)

    def __repr__(self) -> str:
        return f"TriPlaneDiagram(b={self.b})"


def surface_components(diagram: TriPlaneDiagram) -> int:
    """Connected components of the union of all three tangles."""

    return len(component_partition(diagram))


def component_partition(diagram: TriPlaneDiagram) -> list[list[int]]:
    """Partition of bridge points into surface components.

    Components are ordered by smallest bridge point; points within a
    component are sorted.
    """

    n = 2 * diagram.b
    parent = list(range(n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t in diagram.tangles:
        for arc in t.arcs:
            a, b = (find(e) for e in arc.ends)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for p in range(1, n + 1):
        groups.setdefault(find(p), []).append(p)
    return [groups[r] for r in sorted(groups)]


def euler_characteristic(diagram: TriPlaneDiagram) -> int:
    """chi = c1 + c2 + c3 - b, requiring all three pairs certified."""

    c1, c2, c3 = diagram.certified_counts()
    return c1 + c2 + c3 - diagram.b


@dataclass
class SurfaceOrientation:
    """A coherent orientation: direction bit per (tangle index, arc).

    ``True`` means the arc runs from its smaller to its larger bridge point.
    At every bridge point the three incident arc-ends are then all outward
    or all inward.
    """

    direction: dict[tuple[int, tuple[int, int]], bool]

    def is_forward(self, tangle_index: int, arc: Arc) -> bool:
        return self.direction[(tangle_index, arc.ends)]


def orient(diagram: TriPlaneDiagram) -> SurfaceOrientation | None:
    """Find a coherent orientation, or None if the surface is nonorientable.

    Union-find with parity: variable per arc (1 = reversed), constraint per
    bridge point that all three incident ends share outward status.
    Disconnected surfaces are oriented independently per component with a
    deterministic tie-break.
    """

    arcs = [(ti, arc) for ti, t in enumerate(diagram.tangles) for arc in t.arcs]
    index = {key: i for i, key in enumerate((ti, a.ends) for ti, a in arcs)}
    n = len(arcs)
    parent = list(range(n))
    parity = [0] * n  # parity to parent

    def root_of(x: int) -> tuple[int, int]:
        p = 0
        while parent[x] != x:
            p ^= parity[x]
            x = parent[x]
        return x, p

    def union(x: int, y: int, rel: int) -> bool:
        rx, px = root_of(x)
        ry, py = root_of(y)
        if rx == ry:
            return (px ^ py) == rel
        parent[ry] = rx
        parity[ry] = px ^ py ^ rel
        return True

    # outward(arc end at p) = forward XOR (p is the larger endpoint)
    # constraint at p: outward equal for all three incident ends
    by_point: dict[int, list[tuple[int, int]]] = {}
    for ti, t in enumerate(diagram.tangles):
        for arc in t.arcs:
            i = index[(ti, arc.ends)]
            for p in arc.ends:
                by_point.setdefault(p, []).append((i, 1 if p == arc.ends[1] else 0))
    for p, ends in by_point.items():
        i0, b0 = ends[0]
        for i, bi in ends[1:]:
            # outward_i == outward_0:  (d_i ^ b_i) == (d_0 ^ b_0)
            if not union(i0, i, b0 ^ bi):
                return None

    # deterministic witness: representative of each class set forward
    direction = {}
    for ti, arc in arcs:
        i = index[(ti, arc.ends)]
        r, p = root_of(i)
        direction[(ti, arc.ends)] = p == 0
    return SurfaceOrientation(direction)
