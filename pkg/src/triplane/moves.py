"""Tri-plane moves and the bounded uncrossing search / certification layer.

Interior Reidemeister moves act on one tangle's event word; braid
transposition prepends a common braid word at the bridge line; elementary
perturbation pierces an arc of one tangle down through the bridge sphere,
raising b by one and one c_i by one.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, replace

from .diagram import (
    Cap,
    CertifiedUnlink,
    Crossing,
    Over,
    ProvedNonUnlink,
    StructureError,
    TangleDiagram,
    TriPlaneDiagram,
    UncrossingCertificate,
    Unverified,
)
from .linkgraph import LinkGraph, SearchBudget, fox_count_link, search_uncrossing
from .pairing import NonUnlinkError, PairedDiagram, pair

DEFAULT_NODES = 200_000
DEFAULT_DEPTH = 16


def default_budget() -> SearchBudget:
    nodes = int(os.environ.get("TRIPLANE_BUDGET", DEFAULT_NODES))
    return SearchBudget(nodes=nodes, depth=DEFAULT_DEPTH)


# -- move types ---------------------------------------------------------------


@dataclass(frozen=True)
class RIInsert:
    tangle: int
    cap_event: int  # index of a Cap event in that tangle's word
    over: Over


@dataclass(frozen=True)
class RIRemove:
    tangle: int
    event: int  # index of a Crossing immediately followed by a Cap at same pos


@dataclass(frozen=True)
class RIIInsert:
    tangle: int
    event: int  # insertion position in the word (0..len)
    pos: int  # slot
    over: Over


@dataclass(frozen=True)
class RIIRemove:
    tangle: int
    event: int  # index of first of two adjacent cancelling crossings


@dataclass(frozen=True)
class RIIIMove:
    tangle: int
    event: int  # index of the first of three crossings in the braid pattern


@dataclass(frozen=True)
class BraidTranspose:
    word: tuple[Crossing, ...]


@dataclass(frozen=True)
class Perturb:
    tangle: int
    cap_event: int


@dataclass(frozen=True)
class Deperturb:
    tangle: int
    position: int  # left bridge point of the vertical pair to remove


TriPlaneMove = (
    RIInsert | RIRemove | RIIInsert | RIIRemove | RIIIMove | BraidTranspose | Perturb | Deperturb
)


class MoveError(ValueError):
    pass


# -- word surgery helpers ------------------------------------------------------


def _replace_tangle(d: TriPlaneDiagram, i: int, t: TangleDiagram) -> TriPlaneDiagram:
    ts = list(d.tangles)
    ts[i] = t
    return TriPlaneDiagram(tuple(ts))


def apply_move(diagram: TriPlaneDiagram, move: TriPlaneMove) -> TriPlaneDiagram:
    if isinstance(move, RIInsert):
        t = diagram.tangles[move.tangle]
        ev = t.events
        if not (0 <= move.cap_event < len(ev)) or not isinstance(ev[move.cap_event], Cap):
            raise MoveError("RIInsert location must be a cap event")
        k = ev[move.cap_event].pos
        new = list(ev)
        new.insert(move.cap_event, Crossing(k, move.over))
        return _replace_tangle(diagram, move.tangle, TangleDiagram(t.bridge_number, new))
    if isinstance(move, RIRemove):
        t = diagram.tangles[move.tangle]
        ev = t.events
        i = move.event
        ok = (
            0 <= i < len(ev) - 1
            and isinstance(ev[i], Crossing)
            and isinstance(ev[i + 1], Cap)
            and ev[i].pos == ev[i + 1].pos
        )
        if not ok:
            raise MoveError("RIRemove needs a crossing directly below a cap at its slot")
        new = list(ev)
        del new[i]
        return _replace_tangle(diagram, move.tangle, TangleDiagram(t.bridge_number, new))
    if isinstance(move, RIIInsert):
        t = diagram.tangles[move.tangle]
        new = list(t.events)
        new[move.event : move.event] = [
            Crossing(move.pos, move.over),
            Crossing(move.pos, move.over.flipped()),
        ]
        try:
            return _replace_tangle(diagram, move.tangle, TangleDiagram(t.bridge_number, new))
        except StructureError as exc:
            raise MoveError(f"RIIInsert invalid: {exc}") from exc
    if isinstance(move, RIIRemove):
        t = diagram.tangles[move.tangle]
        ev = t.events
        i = move.event
        ok = (
            0 <= i < len(ev) - 1
            and isinstance(ev[i], Crossing)
            and isinstance(ev[i + 1], Crossing)
            and ev[i].pos == ev[i + 1].pos
            and ev[i].over == ev[i + 1].over.flipped()
        )
        if not ok:
            raise MoveError("RIIRemove needs adjacent cancelling crossings")
        new = list(ev)
        del new[i : i + 2]
        return _replace_tangle(diagram, move.tangle, TangleDiagram(t.bridge_number, new))
    if isinstance(move, RIIIMove):
        t = diagram.tangles[move.tangle]
        ev = t.events
        i = move.event
        if i + 2 >= len(ev) or not all(isinstance(e, Crossing) for e in ev[i : i + 3]):
            raise MoveError("RIII needs three consecutive crossings")
        a, b, c = ev[i : i + 3]
        if not (a.pos == c.pos and abs(b.pos - a.pos) == 1):
            raise MoveError("RIII pattern is X(k) X(k+-1) X(k)")
        if not (a.over == b.over or b.over == c.over):
            raise MoveError("RIII needs a strand over or under both its crossings")
        new = list(ev)
        new[i : i + 3] = [Crossing(b.pos, c.over), Crossing(a.pos, b.over), Crossing(b.pos, a.over)]
        return _replace_tangle(diagram, move.tangle, TangleDiagram(t.bridge_number, new))
    if isinstance(move, BraidTranspose):
        if any(not isinstance(e, Crossing) for e in move.word):
            raise MoveError("braid word must contain only crossings")
        out = []
        for t in diagram.tangles:
            out.append(TangleDiagram(t.bridge_number, list(move.word) + list(t.events)))
        return TriPlaneDiagram(tuple(out))
    if isinstance(move, Perturb):
        return _perturb(diagram, move)
    if isinstance(move, Deperturb):
        return _deperturb(diagram, move)
    raise MoveError(f"unknown move {move!r}")


def _phantom_track(events, gap0: int, stop_event: int | None = None):
    """Track a phantom column inserted at gap0 through an event word.

    Returns the gap position before each event (list) or None if some event
    straddles the phantom.  Gap positions count real strands to the left.
    """

    gap = gap0
    out = [gap]
    for i, ev in enumerate(events):
        if stop_event is not None and i == stop_event:
            return out
        q = ev.pos
        if q == gap:
            return None  # event straddles the phantom column
        if isinstance(ev, Cap):
            if q + 1 <= gap:
                gap -= 2
        out.append(gap)
    return out


def perturb_sites(diagram: TriPlaneDiagram, tangle: int) -> list[tuple[int, int]]:
    """Feasible (cap_event, landing_gap) pairs for Perturb in one tangle."""

    t = diagram.tangles[tangle]
    sites = []
    for i, ev in enumerate(t.events):
        if not isinstance(ev, Cap):
            continue
        for g in range(0, 2 * t.bridge_number + 1):
            track = _phantom_track(t.events, g, stop_event=i)
            if track is not None and track[-1] == ev.pos:
                sites.append((i, g))
                break  # deterministic: smallest feasible landing
    return sites


def _perturb(diagram: TriPlaneDiagram, move: Perturb) -> TriPlaneDiagram:
    j = move.tangle
    t = diagram.tangles[j]
    if not (0 <= move.cap_event < len(t.events)) or not isinstance(
        t.events[move.cap_event], Cap
    ):
        raise MoveError("Perturb location must be a cap event")
    cap = t.events[move.cap_event]
    landing = None
    for g in range(0, 2 * t.bridge_number + 1):
        track = _phantom_track(t.events, g, stop_event=move.cap_event)
        if track is not None and track[-1] == cap.pos:
            landing = g
            track_full = track
            break
    if landing is None:
        raise MoveError("Perturb site blocked: no clear descent to the bridge line")
    b2 = t.bridge_number + 1
    new_tangles = []
    for ti, tt in enumerate(diagram.tangles):
        if ti != j:
            new_tangles.append(
                TangleDiagram(b2, [Cap(landing + 1)] + list(tt.events))
            )
            continue
        rebuilt: list = []
        for i, ev in enumerate(tt.events):
            if i < move.cap_event:
                gap = track_full[i]
                q = ev.pos if ev.pos + 1 <= gap else ev.pos + 2
                rebuilt.append(Crossing(q, ev.over) if isinstance(ev, Crossing) else Cap(q))
            elif i == move.cap_event:
                # gap == cap.pos here, so the pierced cap splits in place
                rebuilt.append(Cap(ev.pos))
                rebuilt.append(Cap(ev.pos))
            else:
                # the double cap consumed the new pair where the old cap
                # consumed two strands, so later positions are unchanged
                rebuilt.append(ev)
        new_tangles.append(TangleDiagram(b2, rebuilt))
    return TriPlaneDiagram(tuple(new_tangles))


def _deperturb(diagram: TriPlaneDiagram, move: Deperturb) -> TriPlaneDiagram:
    j = move.tangle
    q = move.position  # bridge points q, q+1 are the vertical pair
    b = diagram.b
    if not (1 <= q < 2 * b):
        raise MoveError("Deperturb position out of range")
    new_tangles = []
    for ti, t in enumerate(diagram.tangles):
        ids = list(range(1, 2 * b + 1))
        slots = list(ids)
        new_events = []
        if ti != j:
            # expect strands q, q+1 to cap each other, untouched by crossings
            removed = False
            for ev in t.events:
                k = ev.pos
                live = slots
                involved = live[k - 1 : k + 1]
                if isinstance(ev, Crossing):
                    if q in involved or q + 1 in involved:
                        raise MoveError(
                            f"tangle {ti + 1}: strands {q},{q + 1} are crossed; "
                            "not a perturbed site"
                        )
                    slots[k - 1], slots[k] = slots[k], slots[k - 1]
                    new_events.append(Crossing(_drop_pos(live, k, q), ev.over))
                else:
                    if set(involved) == {q, q + 1}:
                        removed = True
                        del slots[k - 1 : k + 1]
                        continue
                    if q in involved or q + 1 in involved:
                        raise MoveError(
                            f"tangle {ti + 1}: strand {q} or {q + 1} caps with an "
                            "outside strand; not a perturbed site"
                        )
                    new_events.append(Cap(_drop_pos(live, k, q)))
                    del slots[k - 1 : k + 1]
            if not removed:
                raise MoveError("vertical cap not found")
        else:
            # expect the two nested caps of the pierced arc, adjacent in the
            # word: (L, q) then (q+1, R); fuse them back to one cap (L, R)
            cap_hits: list[tuple[int, int]] = []  # (word index, dropped pos)
            for ei, ev in enumerate(t.events):
                k = ev.pos
                live = slots
                involved = list(live[k - 1 : k + 1])
                if isinstance(ev, Crossing):
                    if q in involved or q + 1 in involved:
                        raise MoveError("pierced strands are crossed; cannot deperturb")
                    dropped = _drop_pos(live, k, q)
                    slots[k - 1], slots[k] = slots[k], slots[k - 1]
                    new_events.append(Crossing(dropped, ev.over))
                else:
                    if q in involved and q + 1 in involved:
                        raise MoveError("pierced pair caps itself in the pierced tangle")
                    if q in involved or q + 1 in involved:
                        cap_hits.append((ei, _drop_pos(live, k, q)))
                        del slots[k - 1 : k + 1]
                    else:
                        new_events.append(Cap(_drop_pos(live, k, q)))
                        del slots[k - 1 : k + 1]
            if len(cap_hits) != 2 or cap_hits[1][0] - cap_hits[0][0] != 1:
                raise MoveError("pierced caps not found adjacent; cannot deperturb")
            fused_pos = cap_hits[0][1]
            # the fused cap takes the word slot of the first pierced cap
            rebuilt = []
            count = 0
            placed = False
            for ei, ev in enumerate(t.events):
                if ei == cap_hits[0][0]:
                    rebuilt.append(Cap(fused_pos))
                    placed = True
                elif ei == cap_hits[1][0]:
                    continue
                else:
                    rebuilt.append(new_events[count])
                    count += 1
            assert placed and count == len(new_events)
            new_events = rebuilt
        new_tangles.append(TangleDiagram(b - 1, new_events))
    return TriPlaneDiagram(tuple(new_tangles))


def _drop_pos(live: list[int], k: int, q: int) -> int:
    """Event position after strands q, q+1 are deleted from the picture."""

    left = sum(1 for s in live[: k - 1] if s not in (q, q + 1))
    return left + 1


# -- certification -------------------------------------------------------------


def uncross_search(
    paired: PairedDiagram, budget: SearchBudget | None = None
) -> CertifiedUnlink | Unverified | ProvedNonUnlink:
    budget = budget or default_budget()
    g = LinkGraph.from_paired(paired)
    outcome = search_uncrossing(g, budget)
    if outcome.certificate_moves is not None:
        ri_pos = sum(1 for m in outcome.certificate_moves if m.kind == "RI" and m.sign > 0)
        ri_neg = sum(1 for m in outcome.certificate_moves if m.kind == "RI" and m.sign < 0)
        rii = sum(1 for m in outcome.certificate_moves if m.kind == "RII")
        riii = sum(1 for m in outcome.certificate_moves if m.kind == "RIII")
        cert = UncrossingCertificate(
            tuple(outcome.certificate_moves), ri_pos, ri_neg, rii, riii
        )
        w = paired.writhe(strict=False)
        if cert.branch_sum != w:
            raise StructureError(
                f"certificate branch sum {cert.branch_sum} != writhe {w}"
            )
        # necessary-condition consistency: a certified unlink must pass screens
        verdict = _screens(paired, g)
        if verdict is not None:
            raise StructureError(
                f"internal error: certificate found but screen failed: {verdict}"
            )
        return CertifiedUnlink(paired.link_components(), cert)
    verdict = _screens(paired, g)
    if verdict is not None:
        return verdict
    return Unverified(f"search budget exhausted after {outcome.nodes_used} nodes")


def _screens(paired: PairedDiagram, g: LinkGraph) -> ProvedNonUnlink | None:
    try:
        paired.writhe(strict=True)
    except NonUnlinkError as exc:
        return ProvedNonUnlink(str(exc))
    c = paired.link_components()
    for p in (3, 5, 7):
        count = fox_count_link(g, p)
        if count != p**c:
            return ProvedNonUnlink(
                f"Fox {p}-coloring count {count} != {p}^{c}; not an unlink"
            )
    return None


def certify(
    diagram: TriPlaneDiagram, budget: SearchBudget | None = None
) -> TriPlaneDiagram:
    """Certify all three pair closures, returning an annotated diagram."""

    statuses = []
    for i in range(3):
        statuses.append(uncross_search(pair(diagram, i), budget))
    return diagram.with_certification(tuple(statuses))


def triple_point_upper(
    diagram: TriPlaneDiagram, budget: SearchBudget | None = None
) -> int | Unverified:
    """Upper bound for the triple point number: sum of certificate RIII counts."""

    d = diagram if diagram.all_certified else certify(diagram, budget)
    total = 0
    for st in d.certification:
        if not isinstance(st, CertifiedUnlink):
            return Unverified(f"pair not certified: {st}")
        total += st.certificate.riii
    return total


def replay_certificate(paired: PairedDiagram, cert: UncrossingCertificate) -> bool:
    """Re-run a certificate's moves; True iff the result is crossingless."""

    g = LinkGraph.from_paired(paired)
    for m in cert.moves:
        if m.kind == "RII":
            g.apply_rii(m.site)
        elif m.kind == "RI":
            g.apply_ri(m.site)
        else:
            g.apply_riii(m.site)
    return g.n_crossings == 0 and g.free_loops == paired.link_components()


# -- random move generation (seeded property tests) ----------------------------


def random_move(diagram: TriPlaneDiagram, rng: random.Random) -> TriPlaneMove | None:
    kinds = ["ri_insert", "rii_insert", "braid", "perturb", "riii", "rii_remove", "ri_remove"]
    rng.shuffle(kinds)
    b = diagram.b
    for kind in kinds:
        if kind == "ri_insert":
            ti = rng.randrange(3)
            caps = [
                i
                for i, e in enumerate(diagram.tangles[ti].events)
                if isinstance(e, Cap)
            ]
            if caps:
                return RIInsert(ti, rng.choice(caps), rng.choice([Over.LEFT, Over.RIGHT]))
        elif kind == "rii_insert":
            ti = rng.randrange(3)
            t = diagram.tangles[ti]
            spots = []
            live = 2 * b
            counts = [live]
            for e in t.events:
                if isinstance(e, Cap):
                    live -= 2
                counts.append(live)
            for i, live_here in enumerate(counts):
                if live_here >= 2:
                    spots.append((i, rng.randrange(1, live_here)))
            if spots:
                i, k = rng.choice(spots)
                return RIIInsert(ti, i, k, rng.choice([Over.LEFT, Over.RIGHT]))
        elif kind == "braid":
            word = []
            for _ in range(rng.randrange(1, 3)):
                word.append(
                    Crossing(rng.randrange(1, 2 * b), rng.choice([Over.LEFT, Over.RIGHT]))
                )
            return BraidTranspose(tuple(word))
        elif kind == "perturb":
            ti = rng.randrange(3)
            sites = perturb_sites(diagram, ti)
            if sites:
                cap_event, _gap = rng.choice(sites)
                return Perturb(ti, cap_event)
        elif kind == "riii":
            ti = rng.randrange(3)
            ev = diagram.tangles[ti].events
            sites = []
            for i in range(len(ev) - 2):
                a, bb, c = ev[i : i + 3]
                if (
                    all(isinstance(e, Crossing) for e in (a, bb, c))
                    and a.pos == c.pos
                    and abs(bb.pos - a.pos) == 1
                    and (a.over == bb.over or bb.over == c.over)
                ):
                    sites.append(i)
            if sites:
                return RIIIMove(ti, rng.choice(sites))
        elif kind == "rii_remove":
            ti = rng.randrange(3)
            ev = diagram.tangles[ti].events
            sites = [
                i
                for i in range(len(ev) - 1)
                if isinstance(ev[i], Crossing)
                and isinstance(ev[i + 1], Crossing)
                and ev[i].pos == ev[i + 1].pos
                and ev[i].over == ev[i + 1].over.flipped()
            ]
            if sites:
                return RIIRemove(ti, rng.choice(sites))
        elif kind == "ri_remove":
            ti = rng.randrange(3)
            ev = diagram.tangles[ti].events
            sites = [
                i
                for i in range(len(ev) - 1)
                if isinstance(ev[i], Crossing)
                and isinstance(ev[i + 1], Cap)
                and ev[i].pos == ev[i + 1].pos
            ]
            if sites:
                return RIRemove(ti, rng.choice(sites))
    return None
