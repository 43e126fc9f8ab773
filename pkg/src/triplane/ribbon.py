"""Ribbon presentations, virtual graphs, and compilation to tri-plane diagrams.

A ribbon presentation fuses n 2-spheres by m tubes; each tube records the
spheres it passes through with a sign.  Compilation produces an
(n+2m; n,n,n) tri-plane diagram: sphere i occupies a block of bridge
points, each tube contributes a pinch bump next to its source sphere and a
tip bump next to its target, the middle tangle is plain caps, the third
tangle is the band-surgered shift pattern, and the first tangle carries
the tube routes with their under/over passes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import Cap, Crossing, Over, StructureError, TangleDiagram, TriPlaneDiagram


class RibbonError(ValueError):
    pass


@dataclass(frozen=True)
class UnderSphere:
    sphere: int  # 1-based
    sign: int  # +-1


@dataclass(frozen=True)
class VirtualCross:
    tube: int  # 1-based index of the other tube


TubeEvent = UnderSphere | VirtualCross


@dataclass(frozen=True)
class Tube:
    bottom: int  # source sphere (1-based)
    top: int  # target sphere
    events: tuple[TubeEvent, ...] = ()


@dataclass
class RibbonPresentation:
    n: int
    m: int
    tubes: list[Tube]

    def __post_init__(self) -> None:
        if self.n < 1 or self.m != len(self.tubes):
            raise RibbonError("tube count must match m and n must be positive")
        for t in self.tubes:
            if not (1 <= t.bottom <= self.n and 1 <= t.top <= self.n):
                raise RibbonError(f"tube endpoints out of range: {t}")
            for ev in t.events:
                if isinstance(ev, UnderSphere):
                    if not (1 <= ev.sphere <= self.n) or ev.sign not in (1, -1):
                        raise RibbonError(f"bad tube event {ev}")
                elif not (1 <= ev.tube <= self.m):
                    raise RibbonError(f"bad virtual crossing {ev}")
        self.normalize()

    def normalize(self) -> None:
        """Cancel adjacent opposite passes through the same sphere."""

        new_tubes = []
        for t in self.tubes:
            evs = list(t.events)
            changed = True
            while changed:
                changed = False
                for i in range(len(evs) - 1):
                    a, b = evs[i], evs[i + 1]
                    if (
                        isinstance(a, UnderSphere)
                        and isinstance(b, UnderSphere)
                        and a.sphere == b.sphere
                        and a.sign == -b.sign
                    ):
                        del evs[i : i + 2]
                        changed = True
                        break
            new_tubes.append(Tube(t.bottom, t.top, tuple(evs)))
        self.tubes = new_tubes

    def fusion_components(self) -> int:
        parent = list(range(self.n + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for t in self.tubes:
            a, b = find(t.bottom), find(t.top)
            if a != b:
                parent[max(a, b)] = min(a, b)
        return len({find(i) for i in range(1, self.n + 1)})

    def genus_if_connected(self) -> int:
        return self.m - self.n + 1


@dataclass
class VirtualGraph:
    """n vertical edges and m monotone tube edges with classical/virtual data."""

    n: int
    m: int
    tubes: list[Tube]

    @property
    def euler_characteristic(self) -> int:
        return self.n - self.m

    @property
    def bridge_position(self) -> int:
        return self.n


def graph_from_ribbon(r: RibbonPresentation) -> VirtualGraph:
    return VirtualGraph(r.n, r.m, list(r.tubes))


@dataclass
class CompiledTriPlane:
    diagram: TriPlaneDiagram
    sphere_points: list[tuple[int, int]]  # (a_i, b_i) bridge points per sphere


def spin_2bridge(alpha: int, beta: int) -> RibbonPresentation:
    """Ribbon presentation of the spun 2-bridge knot S(alpha, beta).

    Spheres correspond to the two plat minima, the tube to the surviving
    maximum; its passes transcribe the Schubert normal form.
    """

    import math

    if alpha < 1 or beta % 2 == 0 or not (-alpha < beta <= alpha):
        raise RibbonError("need alpha > 0, beta odd, -alpha < beta <= alpha")
    if beta == alpha and alpha != 1:
        raise RibbonError("beta = alpha only for the unknot S(1,1)")
    if math.gcd(alpha, abs(beta)) != 1:
        raise RibbonError("alpha and beta must be coprime")
    events = []
    for i in range(1, alpha):
        eps = 1 if (i * beta // alpha) % 2 == 0 else -1
        sphere = 2 if i % 2 == 1 else 1
        events.append(UnderSphere(sphere, eps))
    return RibbonPresentation(2, 1, [Tube(1, 2, tuple(events))])


# -- the compiler ---------------------------------------------------------------


class _Router:
    """Builds the route tangle word by moving strands across live slots."""

    def __init__(self, ids: list[int]):
        self.slots = list(ids)  # strand ids, left to right
        self.word: list = []
        self.log: list[tuple[int, bool, bool]] = []  # (static, mover_over, right)

    def pos(self, sid: int) -> int:
        return self.slots.index(sid)

    def cross(self, i: int, mover_over: bool, moving_right: bool) -> None:
        """Swap slots i, i+1 (0-based) where the mover sits on the moving side."""

        left_over = (moving_right and mover_over) or (
            not moving_right and not mover_over
        )
        static = self.slots[i + 1] if moving_right else self.slots[i]
        self.word.append(Crossing(i + 1, Over.LEFT if left_over else Over.RIGHT))
        self.slots[i], self.slots[i + 1] = self.slots[i + 1], self.slots[i]
        self.log.append((static, mover_over, moving_right))

    def step(self, sid: int, moving_right: bool, mover_over: bool) -> int:
        """Move strand sid one slot; returns the static strand crossed."""

        i = self.pos(sid)
        if moving_right:
            static = self.slots[i + 1]
            self.cross(i, mover_over, True)
        else:
            static = self.slots[i - 1]
            self.cross(i - 1, mover_over, False)
        return static

    def move_until_past(self, sid: int, wall: int, wall_over: bool, front) -> None:
        """Move sid toward and just past the wall strand.

        Every strand met before the wall is crossed with the ``front`` rule;
        the wall itself is crossed with mover-over = ``wall_over``.
        """

        direction_right = self.pos(sid) < self.pos(wall)
        while True:
            i = self.pos(sid)
            nxt = self.slots[i + 1] if direction_right else self.slots[i - 1]
            if nxt == wall:
                self.step(sid, direction_right, wall_over)
                return
            self.step(sid, direction_right, front(nxt))

    def park_beside(self, sid: int, anchor: int, front) -> None:
        while abs(self.pos(sid) - self.pos(anchor)) > 1:
            self.step(sid, self.pos(sid) < self.pos(anchor), front(None))

    def cap(self, sid_a: int, sid_b: int) -> None:
        ia, ib = self.pos(sid_a), self.pos(sid_b)
        if abs(ia - ib) != 1:
            raise RibbonError(f"cannot cap non-adjacent strands {sid_a}, {sid_b}")
        k = min(ia, ib)
        self.word.append(Cap(k + 1))
        del self.slots[k : k + 2]


def triplane_from_graph(g: VirtualGraph) -> CompiledTriPlane:
    """Compile an n-bridge virtual graph to an (n+2m; n,n,n) tri-plane diagram."""

    n, m = g.n, g.m
    b = n + 2 * m
    # ---- slot layout: per sphere [u-pairs (incoming), a, b, d-pairs (outgoing)]
    incoming: dict[int, list[int]] = {i: [] for i in range(1, n + 1)}
    outgoing: dict[int, list[int]] = {i: [] for i in range(1, n + 1)}
    for tix, t in enumerate(g.tubes):
        outgoing[t.bottom].append(tix)
        incoming[t.top].append(tix)
    point: dict = {}
    cursor = 1
    sphere_points = []
    for i in range(1, n + 1):
        point[("a", i)] = cursor
        point[("b", i)] = cursor + 1
        sphere_points.append((cursor, cursor + 1))
        cursor += 2
        for tix in outgoing[i]:
            point[("d1", tix)] = cursor
            point[("d2", tix)] = cursor + 1
            cursor += 2
        for tix in incoming[i]:
            point[("u1", tix)] = cursor
            point[("u2", tix)] = cursor + 1
            cursor += 2
    assert cursor == 2 * b + 1

    def block(i: int) -> list[int]:
        out = [point[("a", i)], point[("b", i)]]
        for tix in outgoing[i]:
            out += [point[("d1", tix)], point[("d2", tix)]]
        for tix in incoming[i]:
            out += [point[("u1", tix)], point[("u2", tix)]]
        return out

    # ---- tangle 2: plain caps over every consecutive block pair
    pairs2 = []
    for i in range(1, n + 1):
        blk = block(i)
        pairs2 += [(blk[j], blk[j + 1]) for j in range(0, len(blk), 2)]
    t2 = _caps_only(b, pairs2)

    # ---- tangle 3: band-surgered shift pattern per sphere block
    pairs3 = []
    for i in range(1, n + 1):
        blk = block(i)
        pairs3.append((blk[0], blk[-1]))
        for j in range(1, len(blk) - 1, 2):
            pairs3.append((blk[j], blk[j + 1]))
    t3 = _caps_only(b, pairs3)

    # ---- tangle 1: routes
    t1 = _route_tangle(g, b, point, incoming, outgoing)

    diagram = TriPlaneDiagram((t1, t2, t3))
    return CompiledTriPlane(diagram, sphere_points)


def _caps_only(b: int, pairs: list[tuple[int, int]]) -> TangleDiagram:
    """Tangle consisting of caps realizing a non-crossing matching."""

    slots = list(range(1, 2 * b + 1))
    events = []
    want = {frozenset(p) for p in pairs}
    progress = True
    while slots and progress:
        progress = False
        for k in range(len(slots) - 1):
            if frozenset((slots[k], slots[k + 1])) in want:
                events.append(Cap(k + 1))
                want.discard(frozenset((slots[k], slots[k + 1])))
                del slots[k : k + 2]
                progress = True
                break
    if slots:
        raise RibbonError(f"matching is not planar: {sorted(map(tuple, want))}")
    return TangleDiagram(b, events)


def _route_tangle(g, b, point, incoming, outgoing) -> TangleDiagram:
    router = _Router(list(range(1, 2 * b + 1)))
    routed: set[int] = set()  # strands of already-routed tubes stay in front

    def front(static) -> bool:
        return static not in routed

    def run_out(mover: int, events) -> list[tuple[int, bool, bool]]:
        """Outbound tube wall: the cable stays over, weaving past the event
        walls in itinerary order; the walls pass under the cable, which is
        where the conjugations accumulate.  Returns the swap log."""

        mark = len(router.log)
        for ev in events:
            side = "a" if ev.sign > 0 else "b"
            wall = point[(side, ev.sphere)]
            router.move_until_past(mover, wall, wall_over=True, front=front)
        return router.log[mark:]

    def replay_back(mover: int, outlog) -> None:
        """Return tube wall: mirror the outbound swaps in reverse."""

        for static, mover_over, moving_right in reversed(outlog):
            i = router.pos(mover)
            expect = (
                router.slots[i - 1] if moving_right else router.slots[i + 1]
            )
            if expect != static:
                raise RibbonError("return wall lost track of the cable corridor")
            router.step(mover, not moving_right, mover_over)

    for tix, tube in enumerate(g.tubes):
        events = [ev for ev in tube.events if isinstance(ev, UnderSphere)]
        if tube.bottom == tube.top:
            # handle-style tube: arcs {d1,u2}, {b,u1}, {a,d2} (the unique
            # orientable hookup); d1 travels right beneath its own block
            mover = point[("d1", tix)]
            outlog = run_out(mover, events)
            router.park_beside(mover, point[("u2", tix)], front)
            router.cap(mover, point[("u2", tix)])
            routed.add(mover)
            mover2 = point[("b", tube.bottom)]
            router.park_beside(mover2, point[("u1", tix)], front)
            router.cap(mover2, point[("u1", tix)])
            continue
        # outbound wall: d2's strand weaves through the events to the tip
        mover = point[("d2", tix)]
        outlog = run_out(mover, events)
        park_log_mark = len(router.log)
        router.park_beside(mover, point[("u1", tix)], front)
        park_log = router.log[park_log_mark:]
        router.cap(mover, point[("u1", tix)])
        # return wall: u2's strand retraces the corridor exactly, then parks
        # beside the next pinch bump of its source sphere (or beside a)
        mover = point[("u2", tix)]
        replay_back(mover, outlog + park_log)
        chain = [
            t2
            for t2 in outgoing[tube.bottom]
            if g.tubes[t2].bottom != g.tubes[t2].top
        ]
        at = chain.index(tix)
        if at + 1 < len(chain):
            anchor = point[("d1", chain[at + 1])]
        else:
            anchor = point[("a", tube.bottom)]
        router.park_beside(mover, anchor, front)
        routed.add(mover)
    # end caps: remaining arcs must now be nested
    want = {frozenset(p) for p in _remaining_pairs(g, b, point, incoming, outgoing, router)}
    progress = True
    while router.slots and progress:
        progress = False
        for k in range(len(router.slots) - 1):
            pairk = frozenset((router.slots[k], router.slots[k + 1]))
            if pairk in want:
                router.cap(router.slots[k], router.slots[k + 1])
                want.discard(pairk)
                progress = True
                break
    if router.slots:
        raise RibbonError("route tangle end caps are not nested")
    return TangleDiagram(b, router.word)


def _remaining_pairs(g, b, point, incoming, outgoing, router):
    pairs = []
    live = set(router.slots)
    for i in range(1, g.n + 1):
        outs = outgoing[i]
        a_i, b_i = point[("a", i)], point[("b", i)]
        if not outs:
            if a_i in live:
                pairs.append((a_i, b_i))
            continue
        non_handle = [tix for tix in outs if g.tubes[tix].bottom != g.tubes[tix].top]
        if not non_handle:
            # handle tube consumed b, d1, u1, u2; a caps with d2
            handle = outs[0]
            pairs.append((a_i, point[("d2", handle)]))
            continue
        # course: b hops to d1(t1); u2(t_k) returns beside d1(t_{k+1}); the
        # last return parks beside a
        pairs.append((b_i, point[("d1", non_handle[0])]))
        for prev, nxt in zip(non_handle, non_handle[1:]):
            pairs.append((point[("u2", prev)], point[("d1", nxt)]))
        pairs.append((a_i, point[("u2", non_handle[-1])]))
    return pairs
