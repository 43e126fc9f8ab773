"""Fundamental-group machinery for tri-plane diagrams.

Wirtinger presentations of all three types, free-group words, bounded
Tietze simplification, abelianization by Smith normal form, Todd-Coxeter
coset enumeration, Fox and quandle colorings, and peripheral subgroup
generators.

Words are tuples of nonzero ints: g > 0 is generator g-1, g < 0 its
inverse.  The Wirtinger convention: at a positive crossing the outgoing
under-meridian is y x y^-1 (y the over-meridian); the mirrored
configuration uses y^-1 x y.  All isomorphism-invariant outputs are
convention-independent (tested under a global flip).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .diagram import Cap, Crossing, Over, StructureError, TangleDiagram, TriPlaneDiagram

Word = tuple[int, ...]


def reduce_word(w) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inv_word(w) -> Word:
    return tuple(-x for x in reversed(w))


def mul(*ws) -> Word:
    out: list[int] = []
    for w in ws:
        for x in w:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def wpow(w: Word, n: int) -> Word:
    if n < 0:
        return wpow(inv_word(w), -n)
    return mul(*([w] * n)) if n else ()


def cyclic_reduce(w: Word) -> Word:
    w = reduce_word(w)
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return w


@dataclass
class GroupPresentation:
    names: list[str]
    meridian: list[bool]
    relators: list[Word]
    provenance: str = ""

    @property
    def ngens(self) -> int:
        return len(self.names)

    def counts(self) -> tuple[int, int]:
        return (len(self.names), len(self.relators))

    def word_str(self, w: Word) -> str:
        if not w:
            return "1"
        parts = []
        for x in w:
            name = self.names[abs(x) - 1]
            parts.append(name if x > 0 else name + "'")
        return "".join(parts)

    def __repr__(self) -> str:
        rels = ", ".join(self.word_str(r) for r in self.relators)
        return f"< {', '.join(self.names)} | {rels} >"


# -- percolation ---------------------------------------------------------------


@dataclass
class _Slot:
    word: Word
    up: bool  # piece oriented along its ascent
    origin: int  # bridge point this piece ascends from
    passes: list = field(default_factory=list)  # under-pass records


@dataclass
class UnderPass:
    over_word: Word
    sign: int
    side_up: bool  # walking up the percolation direction follows the arc


@dataclass
class ArcTrace:
    """Per-arc record from a percolation: cap relation and under-passes."""

    tangle: int
    ends: tuple[int, int]
    relation: Word
    left_origin: int
    passes_from_left: list[UnderPass]
    passes_from_right: list[UnderPass]


def _crossing_sign(over: Over, left_up: bool, right_up: bool) -> int:
    s = 1 if (left_up == right_up) else -1
    return s if over is Over.LEFT else -s


def _percolate(
    tangle: TangleDiagram,
    tangle_index: int,
    initial: dict[int, tuple[Word, bool]],
    flip: bool = False,
) -> list[ArcTrace]:
    """Run the Wirtinger algorithm up one tangle.

    ``initial[p]`` is (oriented meridian word, up-bit) for the piece rising
    from bridge point p.  Returns one ArcTrace per arc; the relation is
    u * v^-1 for the two slot words meeting at the cap.
    """

    slots = [
        _Slot(initial[p][0], initial[p][1], p)
        for p in range(1, 2 * tangle.bridge_number + 1)
    ]
    traces: list[ArcTrace] = []
    for ev in tangle.events:
        k = ev.pos - 1
        if isinstance(ev, Crossing):
            left, right = slots[k], slots[k + 1]
            s = _crossing_sign(ev.over, left.up, right.up)
            if flip:
                s = -s
            if ev.over is Over.LEFT:
                over, under = left, right
            else:
                over, under = right, left
            sigma = s if under.up else -s
            new_word = mul(
                wpow(over.word, sigma), under.word, wpow(over.word, -sigma)
            )
            new_under = _Slot(
                new_word,
                under.up,
                under.origin,
                under.passes + [UnderPass(over.word, s, under.up)],
            )
            # strands swap slots: the strand entering at k exits at k+1
            slots[k], slots[k + 1] = (
                (over, new_under) if under is left else (new_under, over)
            )
        else:
            left, right = slots[k], slots[k + 1]
            relation = mul(left.word, inv_word(right.word))
            a, b = left.origin, right.origin
            traces.append(
                ArcTrace(
                    tangle_index,
                    (min(a, b), max(a, b)),
                    reduce_word(relation),
                    left.origin,
                    list(left.passes),
                    list(right.passes),
                )
            )
            del slots[k : k + 2]
    return traces


def _arc_direction_bits(diagram: TriPlaneDiagram) -> dict[tuple[int, tuple[int, int]], bool]:
    """Deterministic arc orientations: coherent if orientable, else forward."""

    from .diagram import orient

    witness = orient(diagram)
    if witness is not None:
        return dict(witness.direction)
    return {
        (ti, arc.ends): True
        for ti, t in enumerate(diagram.tangles)
        for arc in t.arcs
    }


def _initial_type1(
    diagram: TriPlaneDiagram, ti: int, dirs
) -> dict[int, tuple[Word, bool]]:
    t = diagram.tangles[ti]
    init: dict[int, tuple[Word, bool]] = {}
    for arc in t.arcs:
        fwd = dirs[(ti, arc.ends)]
        a, b = arc.ends
        # away-bit at each endpoint
        init[a] = ((a,) if fwd else (-a,), fwd)
        init[b] = ((-b,) if fwd else (b,), not fwd)
    return init


def wirtinger_type1(diagram: TriPlaneDiagram, flip: bool = False) -> GroupPresentation:
    """2b meridional generators, 3b cap relations."""

    dirs = _arc_direction_bits(diagram)
    names = [f"x{p}" for p in range(1, 2 * diagram.b + 1)]
    relators: list[Word] = []
    for ti in range(3):
        init = _initial_type1(diagram, ti, dirs)
        for tr in _percolate(diagram.tangles[ti], ti, init, flip):
            relators.append(tr.relation)
    return GroupPresentation(
        names, [True] * len(names), relators, provenance="type1"
    )


def type1_traces(diagram: TriPlaneDiagram, flip: bool = False) -> list[list[ArcTrace]]:
    dirs = _arc_direction_bits(diagram)
    out = []
    for ti in range(3):
        init = _initial_type1(diagram, ti, dirs)
        out.append(_percolate(diagram.tangles[ti], ti, init, flip))
    return out


def wirtinger_type2(
    diagram: TriPlaneDiagram, tangle_index: int, flip: bool = False
) -> GroupPresentation:
    """b generators at the caps of one tangle, 2b relations from the others."""

    dirs = _arc_direction_bits(diagram)
    names = [f"y{j}" for j in range(1, diagram.b + 1)]
    return _wirtinger_type2_full(diagram, tangle_index, dirs, names, flip)


def _cap_sides(t: TangleDiagram) -> list[tuple[int, int]]:
    """Per cap (in event order): bridge origins of (left, right) sides."""

    slots = list(range(1, 2 * t.bridge_number + 1))
    out = []
    for ev in t.events:
        k = ev.pos - 1
        if isinstance(ev, Crossing):
            slots[k], slots[k + 1] = slots[k + 1], slots[k]
        else:
            out.append((slots[k], slots[k + 1]))
            del slots[k : k + 2]
    return out


def _wirtinger_type2_full(diagram, ti, dirs, names, flip) -> GroupPresentation:
    t = diagram.tangles[ti]
    b = diagram.b
    cap_sides = _cap_sides(t)
    # assign generator j to cap j (event order); arrange initial data at the
    # top and percolate down by replaying events in reverse with inverse
    # conjugation updates.
    slots: list[_Slot] = []
    cap_index = len(cap_sides)
    for ev in reversed(t.events):
        k = ev.pos - 1
        if isinstance(ev, Cap):
            cap_index -= 1
            pl, pr = cap_sides[cap_index]
            arc_ends = (min(pl, pr), max(pl, pr))
            fwd = dirs[(ti, arc_ends)]
            word: Word = (cap_index + 1,)
            # up-bit per side: the left side rises from pl
            up_left = fwd if pl == arc_ends[0] else not fwd
            up_right = fwd if pr == arc_ends[0] else not fwd
            slots[k:k] = [
                _Slot(word, up_left, pl),
                _Slot(word, up_right, pr),
            ]
        else:
            # slots currently show the state ABOVE this crossing; the strand
            # entering below at slot k exits above at slot k+1
            above_left, above_right = slots[k], slots[k + 1]
            below_left, below_right = above_right, above_left
            s = _crossing_sign(ev.over, below_left.up, below_right.up)
            if flip:
                s = -s
            if ev.over is Over.LEFT:
                over = below_left
                under_above = above_left
            else:
                over = below_right
                under_above = above_right
            sigma = s if under_above.up else -s
            under_below = _Slot(
                mul(wpow(over.word, -sigma), under_above.word, wpow(over.word, sigma)),
                under_above.up,
                under_above.origin,
                [],
            )
            if ev.over is Over.LEFT:
                slots[k], slots[k + 1] = over, under_below
            else:
                slots[k], slots[k + 1] = under_below, over
    assert len(slots) == 2 * b
    # meridian-away word at each bridge point of tangle ti
    away: dict[int, Word] = {}
    for p, slot in enumerate(slots, start=1):
        assert slot.origin == p or slot.origin == -1
        away[p] = slot.word if slot.up else inv_word(slot.word)
    relators: list[Word] = []
    for tj in range(3):
        if tj == ti:
            continue
        init: dict[int, tuple[Word, bool]] = {}
        for arc in diagram.tangles[tj].arcs:
            fwd = dirs[(tj, arc.ends)]
            a, bb = arc.ends
            init[a] = (away[a] if fwd else inv_word(away[a]), fwd)
            init[bb] = (inv_word(away[bb]) if fwd else away[bb], not fwd)
        for tr in _percolate(diagram.tangles[tj], tj, init, flip):
            relators.append(tr.relation)
    return GroupPresentation(names, [True] * b, relators, provenance=f"type2@{ti}")


def pair_component_signs(diagram: TriPlaneDiagram, i: int):
    """Unlink components of the pair (i, i+1) with alternating signs.

    Returns (components, sign) where components maps bridge point ->
    component index and sign maps bridge point -> +-1, alternating along
    each component cycle (+1 at the smallest point).
    """

    m1 = {arc.ends: arc for arc in diagram.tangles[i].arcs}
    m2 = {arc.ends: arc for arc in diagram.tangles[(i + 1) % 3].arcs}
    nbr: dict[int, list[int]] = {}
    for ends in itertools.chain(m1, m2):
        a, b = ends
        nbr.setdefault(a, []).append(b)
        nbr.setdefault(b, []).append(a)
    comp: dict[int, int] = {}
    sign: dict[int, int] = {}
    cid = 0
    for start in range(1, 2 * diagram.b + 1):
        if start in comp:
            continue
        # walk the cycle alternating tangle-i and tangle-(i+1) arcs
        comp[start] = cid
        sign[start] = 1
        cur = start
        use_first = True
        while True:
            t = diagram.tangles[i] if use_first else diagram.tangles[(i + 1) % 3]
            nxt = t.arc_of(cur).other(cur)
            use_first = not use_first
            if nxt == start:
                break
            comp[nxt] = cid
            sign[nxt] = -sign[cur]
            cur = nxt
        cid += 1
    return comp, sign


def type3_applicable(diagram: TriPlaneDiagram, i: int, budget: int = 20000) -> bool:
    """True if tangles i and i+1 are (reducibly) crossingless."""

    for tj in (i, (i + 1) % 3):
        t = diagram.tangles[tj]
        if t.crossings == 0:
            continue
        if not tangle_word_reducible(t, budget):
            return False
    return True


def tangle_word_reducible(t: TangleDiagram, budget: int = 20000) -> bool:
    """Bounded interior-move search for a crossingless event word."""

    start = tuple(t.events)
    seen = {start}
    queue = [start]
    nodes = 0
    while queue:
        word = queue.pop()
        nodes += 1
        if nodes > budget:
            return False
        if all(isinstance(e, Cap) for e in word):
            return True
        for nxt in _word_neighbors(word, t.bridge_number):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def _word_neighbors(word: tuple, b: int):
    n = len(word)
    for idx in range(n - 1):
        a, c = word[idx], word[idx + 1]
        # RII cancel
        if (
            isinstance(a, Crossing)
            and isinstance(c, Crossing)
            and a.pos == c.pos
            and a.over == c.over.flipped()
        ):
            yield word[:idx] + word[idx + 2 :]
        # RI at cap
        if isinstance(a, Crossing) and isinstance(c, Cap) and a.pos == c.pos:
            yield word[:idx] + word[idx + 1 :]
        # commutation of distant events
        if _commutes(a, c):
            yield word[:idx] + (_shift_past(c, a), _shift_past_inv(a, c)) + word[idx + 2 :]
    # braid relation (RIII)
    for idx in range(n - 2):
        a, c, d = word[idx : idx + 3]
        if (
            all(isinstance(e, Crossing) for e in (a, c, d))
            and a.pos == d.pos
            and abs(c.pos - a.pos) == 1
            and (a.over == c.over or c.over == d.over)
        ):
            yield word[:idx] + (
                Crossing(c.pos, d.over),
                Crossing(a.pos, c.over),
                Crossing(c.pos, a.over),
            ) + word[idx + 3 :]


def _commutes(a, c) -> bool:
    return not ({a.pos, a.pos + 1} & {c.pos, c.pos + 1})


def _shift_past(c, a):
    """Event c moved below event a (a was first).  Positions adjust if a is a cap."""

    if isinstance(a, Cap) and c.pos > a.pos:
        newpos = c.pos + 2
    else:
        newpos = c.pos
    return Crossing(newpos, c.over) if isinstance(c, Crossing) else Cap(newpos)


def _shift_past_inv(a, c):
    if isinstance(c, Cap) and a.pos > c.pos:
        newpos = a.pos - 2
    else:
        newpos = a.pos
    return Crossing(newpos, a.over) if isinstance(a, Crossing) else Cap(newpos)


def wirtinger_type3(
    diagram: TriPlaneDiagram, i: int, flip: bool = False, budget: int = 20000
) -> GroupPresentation | None:
    """c_i generators from the unlink pair (i, i+1), b relations from i+2.

    Returns None (NotApplicable) if the two tangles are not crossingless and
    cannot be made so by bounded interior moves.
    """

    if not type3_applicable(diagram, i, budget):
        return None
    dirs = _arc_direction_bits(diagram)
    comp, sign = pair_component_signs(diagram, i)
    ncomp = len(set(comp.values()))
    names = [f"g{c + 1}" for c in range(ncomp)]
    tk = (i + 2) % 3
    init: dict[int, tuple[Word, bool]] = {}
    for arc in diagram.tangles[tk].arcs:
        fwd = dirs[(tk, arc.ends)]
        a, bb = arc.ends
        for p, away in ((a, fwd), (bb, not fwd)):
            g = comp[p] + 1
            e = sign[p] * (1 if away else -1)
            init[p] = ((g,) if e > 0 else (-g,), away)
    relators = [
        tr.relation for tr in _percolate(diagram.tangles[tk], tk, init, flip)
    ]
    return GroupPresentation(
        names, [True] * ncomp, relators, provenance=f"type3@{i}"
    )


# -- Tietze simplification -----------------------------------------------------


def tietze_simplify(pres: GroupPresentation, budget: int = 10_000) -> GroupPresentation:
    """Bounded presentation simplification (isomorphism preserved).

    Free/cyclic reduction, removal of empty and duplicate relators,
    elimination of generators isolated by short relators, and rewriting of
    relators by shorter halves of other relators.
    """

    names = list(pres.names)
    meridian = list(pres.meridian)
    relators = [cyclic_reduce(r) for r in pres.relators]
    steps = 0

    def sub_in_word(w: Word, target: Word, repl: Word) -> Word | None:
        tl = len(target)
        for s in range(len(w) - tl + 1):
            if w[s : s + tl] == target:
                return reduce_word(w[:s] + repl + w[s + tl :])
        return None

    changed = True
    while changed and steps < budget:
        changed = False
        relators = [cyclic_reduce(r) for r in relators]
        relators = [r for r in relators if r]
        # dedupe up to cyclic rotation and inversion
        seen = set()
        uniq = []
        for r in relators:
            keys = set()
            for w in (r, inv_word(r)):
                for s in range(len(w)):
                    keys.add(w[s:] + w[:s])
            if not (keys & seen):
                uniq.append(r)
                seen |= keys
        if len(uniq) != len(relators):
            relators = uniq
            changed = True
        # generator elimination via relators with a unique occurrence
        for ri, r in enumerate(relators):
            counts: dict[int, int] = {}
            for x in r:
                counts[abs(x)] = counts.get(abs(x), 0) + 1
            lone = [g for g, c in counts.items() if c == 1]
            if not lone:
                continue
            g = min(lone, key=lambda g: len(r))
            k = next(idx for idx, x in enumerate(r) if abs(x) == g)
            rot = r[k + 1 :] + r[:k]
            repl = inv_word(rot) if r[k] > 0 else rot
            # substitute g -> repl everywhere
            def subst(w: Word) -> Word:
                out: list[int] = []
                for x in w:
                    if x == g:
                        out.extend(repl)
                    elif x == -g:
                        out.extend(inv_word(repl))
                    else:
                        out.append(x)
                return reduce_word(tuple(out))

            total_before = sum(len(x) for x in relators)
            new_relators = [subst(x) for i2, x in enumerate(relators) if i2 != ri]
            relators = new_relators
            # remove generator g: renumber
            gm = {}
            new_names = []
            new_mer = []
            for old in range(1, len(names) + 1):
                if old == g:
                    continue
                gm[old] = len(new_names) + 1
                new_names.append(names[old - 1])
                new_mer.append(meridian[old - 1])
            relators = [
                tuple((gm[abs(x)] if x > 0 else -gm[abs(x)]) for x in w)
                for w in relators
            ]
            names, meridian = new_names, new_mer
            steps += 1
            changed = True
            break
        if changed:
            continue
        # relator-vs-relator rewriting: replace long halves by short ones
        for ri, r in enumerate(relators):
            if len(r) < 2:
                continue
            half = len(r) // 2 + 1
            done = False
            for variant in (r, inv_word(r)):
                for s in range(len(variant)):
                    rot = variant[s:] + variant[:s]
                    target = rot[:half]
                    repl = inv_word(rot[half:])
                    if len(repl) >= len(target):
                        continue
                    for rj, other in enumerate(relators):
                        if rj == ri:
                            continue
                        doubled = other + other
                        hit = sub_in_word(doubled, target, repl)
                        if hit is not None and len(reduce_word(hit)) < len(other) + len(other):
                            new = cyclic_reduce(
                                sub_in_word(other, target, repl)
                                if sub_in_word(other, target, repl) is not None
                                else hit
                            )
                            if len(new) < len(other):
                                relators[rj] = new
                                steps += 1
                                changed = True
                                done = True
                                break
                    if done:
                        break
                if done:
                    break
            if done:
                break
    return GroupPresentation(names, meridian, [cyclic_reduce(r) for r in relators if cyclic_reduce(r)], pres.provenance + "+tietze")


# -- abelianization -------------------------------------------------------------


def abelianization(pres: GroupPresentation) -> tuple[list[int], int]:
    """Elementary divisors (> 1) and free rank of H1."""

    rows = []
    for r in pres.relators:
        row = [0] * pres.ngens
        for x in r:
            row[abs(x) - 1] += 1 if x > 0 else -1
        rows.append(row)
    divisors = smith_normal_form(rows, pres.ngens)
    nonzero = [d for d in divisors if d != 0]
    free_rank = pres.ngens - len(nonzero)
    return ([d for d in nonzero if d > 1], free_rank)


def smith_normal_form(rows: list[list[int]], ncols: int) -> list[int]:
    """Diagonal of the Smith normal form (nonnegative, divisibility order)."""

    a = [r[:] for r in rows]
    m, n = len(a), ncols
    diags: list[int] = []
    top = 0
    left = 0
    while top < m and left < n:
        # find a pivot
        piv = None
        best = None
        for i in range(top, m):
            for j in range(left, n):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < best):
                    piv, best = (i, j), abs(a[i][j])
        if piv is None:
            break
        i0, j0 = piv
        a[top], a[i0] = a[i0], a[top]
        for r in a:
            r[left], r[j0] = r[j0], r[left]
        while True:
            # clear column
            again = False
            for i in range(top + 1, m):
                if a[i][left]:
                    q = a[i][left] // a[top][left]
                    for j in range(left, n):
                        a[i][j] -= q * a[top][j]
                    if a[i][left]:
                        a[top], a[i] = a[i], a[top]
                        again = True
            if again:
                continue
            for j in range(left + 1, n):
                if a[top][j]:
                    q = a[top][j] // a[top][left]
                    for i in range(top, m):
                        a[i][j] -= q * a[i][left]
                    if a[top][j]:
                        for i in range(top, m):
                            a[i][left], a[i][j] = a[i][j], a[i][left]
                        again = True
            if not again:
                break
        diags.append(abs(a[top][left]))
        top += 1
        left += 1
    # enforce divisibility
    diags = [d for d in diags]
    changed = True
    while changed:
        changed = False
        for i in range(len(diags) - 1):
            if diags[i] and diags[i + 1] % diags[i] != 0:
                import math

                g = math.gcd(diags[i], diags[i + 1])
                l = diags[i] * diags[i + 1] // g
                diags[i], diags[i + 1] = g, l
                changed = True
            if diags[i] == 0 and diags[i + 1] != 0:
                diags[i], diags[i + 1] = diags[i + 1], diags[i]
                changed = True
    return diags


# -- Todd-Coxeter ---------------------------------------------------------------


class Overflow(Exception):
    pass


def todd_coxeter(
    pres: GroupPresentation,
    subgroup: list[Word] | None = None,
    coset_limit: int = 20_000,
) -> int | None:
    """Index of the subgroup (None on overflow).  HLT with coincidences."""

    ngens = pres.ngens
    nsym = 2 * ngens  # 2g even = generator g+1, odd = inverse

    def sym(x: int) -> int:
        return 2 * (abs(x) - 1) + (0 if x > 0 else 1)

    def inv_sym(s: int) -> int:
        return s ^ 1

    table: list[list[int | None]] = [[None] * nsym]
    p = [0]  # union-find for coincidences

    def rep(c: int) -> int:
        while p[c] != c:
            p[c] = p[p[c]]
            c = p[c]
        return c

    pending: list[tuple[int, int]] = []

    def merge(a: int, b: int) -> None:
        a, b = rep(a), rep(b)
        if a != b:
            a, b = min(a, b), max(a, b)
            p[b] = a
            pending.append((a, b))

    def define(c: int, s: int) -> int:
        if len(table) >= coset_limit:
            raise Overflow
        new = len(table)
        table.append([None] * nsym)
        p.append(new)
        table[c][s] = new
        table[new][inv_sym(s)] = c
        return new

    def deduce(c: int, s: int, d: int) -> None:
        c, d = rep(c), rep(d)
        ex = table[c][s]
        if ex is None:
            table[c][s] = d
        elif rep(ex) != d:
            merge(ex, d)
        ex2 = table[d][inv_sym(s)]
        if ex2 is None:
            table[d][inv_sym(s)] = c
        elif rep(ex2) != c:
            merge(ex2, c)

    def process_coincidences() -> None:
        while pending:
            keep, kill = pending.pop()
            keep = rep(keep)
            # kill is the literal dead coset; move its row to the keeper
            for s in range(nsym):
                d = table[kill][s]
                if d is None:
                    continue
                table[kill][s] = None
                deduce(rep(keep), s, rep(d))

    def scan_and_fill(c: int, word: Word) -> None:
        syms = [sym(x) for x in word]
        n = len(syms)
        if n == 0:
            return
        while True:
            c = rep(c)
            f, i = c, 0
            while i < n:
                nxt = table[rep(f)][syms[i]]
                if nxt is None:
                    break
                f = rep(nxt)
                i += 1
            if i == n:
                if f != c:
                    merge(f, c)
                    process_coincidences()
                return
            b, j = c, n - 1
            while j >= i:
                prev = table[rep(b)][inv_sym(syms[j])]
                if prev is None:
                    break
                b = rep(prev)
                j -= 1
            if j < i:
                merge(f, b)
                process_coincidences()
                return
            if j == i:
                deduce(f, syms[i], b)
                process_coincidences()
                return
            define(rep(f), syms[i])

    try:
        for w in subgroup or []:
            scan_and_fill(0, w)
        c = 0
        while c < len(table):
            if rep(c) != c:
                c += 1
                continue
            for r in pres.relators:
                if rep(c) != c:
                    break
                scan_and_fill(c, r)
            if rep(c) != c:
                c += 1
                continue
            for s in range(nsym):
                if rep(c) != c:
                    break
                if table[c][s] is None:
                    define(c, s)
                    scan_and_fill(c, tuple())
            c += 1
        live = {rep(i) for i in range(len(table))}
        # completeness check
        for c in live:
            for s in range(nsym):
                if table[c][s] is None or rep(table[c][s]) not in live:
                    if table[c][s] is None:
                        raise Overflow
        return len(live)
    except Overflow:
        return None


# -- colorings ------------------------------------------------------------------


def _tangle_pieces(diagram: TriPlaneDiagram):
    """Pieces of all tangles with crossing and bridge constraints.

    Returns (npieces, bridge_of_piece, crossings, caps): crossings are
    (under_in, over, under_out, sigma) piece-index tuples; caps are
    (left_piece, right_piece) equalities; bridge_of_piece maps the piece
    rising from each bridge point in each tangle.
    """

    dirs = _arc_direction_bits(diagram)
    npieces = 0
    bridge_piece: dict[tuple[int, int], int] = {}
    crossings = []
    caps = []
    for ti, t in enumerate(diagram.tangles):
        slots = []
        for po in range(1, 2 * t.bridge_number + 1):
            arc = t.arc_of(po)
            fwd = dirs[(ti, arc.ends)]
            up = fwd if po == arc.ends[0] else not fwd
            slots.append((npieces, up))
            bridge_piece[(ti, po)] = npieces
            npieces += 1
        for ev in t.events:
            k = ev.pos - 1
            if isinstance(ev, Crossing):
                left, right = slots[k], slots[k + 1]
                s = _crossing_sign(ev.over, left[1], right[1])
                over, under = (left, right) if ev.over is Over.LEFT else (right, left)
                sigma = s if under[1] else -s
                new = (npieces, under[1])
                npieces += 1
                crossings.append((under[0], over[0], new[0], sigma))
                slots[k], slots[k + 1] = (
                    (over, new) if under is left else (new, over)
                )
            else:
                caps.append((slots[k][0], slots[k + 1][0]))
                del slots[k : k + 2]
    return npieces, bridge_piece, crossings, caps


def fox_coloring_count(diagram: TriPlaneDiagram, p: int) -> int:
    """Fox p-colorings of the tri-plane diagram (p an odd prime)."""

    if p < 3 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
        raise ValueError("p must be an odd prime")
    npieces, bridge_piece, crossings, caps = _tangle_pieces(diagram)
    rows = []

    def new_row():
        return [0] * npieces

    for under_in, over, under_out, _sigma in crossings:
        row = new_row()
        row[under_in] += 1
        row[under_out] += 1
        row[over] -= 2
        rows.append(row)
    for a, b in caps:
        row = new_row()
        row[a] += 1
        row[b] -= 1
        rows.append(row)
    for po in range(1, 2 * diagram.b + 1):
        base = bridge_piece[(0, po)]
        for ti in (1, 2):
            row = new_row()
            row[base] += 1
            row[bridge_piece[(ti, po)]] -= 1
            rows.append(row)
    rows = [[v % p for v in r] for r in rows]
    from .linkgraph import _rank_mod_p

    rank = _rank_mod_p(rows, npieces, p)
    return p ** (npieces - rank)


@dataclass(frozen=True)
class FiniteQuandle:
    table: tuple[tuple[int, ...], ...]  # table[x][y] = x * y

    @property
    def order(self) -> int:
        return len(self.table)

    def validate(self) -> None:
        q = self.order
        for x in range(q):
            if self.table[x][x] != x:
                raise ValueError(f"not idempotent at {x}")
        for y in range(q):
            col = [self.table[x][y] for x in range(q)]
            if sorted(col) != list(range(q)):
                raise ValueError(f"right translation by {y} not a bijection")
        for x in range(q):
            for y in range(q):
                for z in range(q):
                    lhs = self.table[self.table[x][y]][z]
                    rhs = self.table[self.table[x][z]][self.table[y][z]]
                    if lhs != rhs:
                        raise ValueError("not right self-distributive")

    def inverse_op(self, z: int, y: int) -> int:
        # the unique x with x * y = z
        col = [self.table[x][y] for x in range(self.order)]
        return col.index(z)


def dihedral_quandle(n: int) -> FiniteQuandle:
    return FiniteQuandle(
        tuple(tuple((2 * y - x) % n for y in range(n)) for x in range(n))
    )


def conjugation_quandle(mult: list[list[int]], inverse: list[int]) -> FiniteQuandle:
    n = len(mult)
    return FiniteQuandle(
        tuple(
            tuple(mult[inverse[y]][mult[x][y]] for y in range(n)) for x in range(n)
        )
    )


def quandle_coloring_count(diagram: TriPlaneDiagram, quandle: FiniteQuandle) -> int:
    """Quandle colorings by backtracking over bridge-point colors.

    Crossing rule: under-out = under-in * over at sigma = +1, and the
    inverse operation at sigma = -1, with the deterministic arc
    orientations.  For involutory quandles (keis) the count is
    orientation-independent.
    """

    quandle.validate()
    npieces, bridge_piece, crossings, caps = _tangle_pieces(diagram)
    q = quandle.order
    b2 = 2 * diagram.b
    # precompute propagation order: crossings are emitted in simulation
    # order per tangle, so a single pass propagates bottom-up
    colors = [None] * npieces

    count = 0

    def propagate() -> bool:
        for under_in, over, under_out, sigma in crossings:
            ci, co = colors[under_in], colors[over]
            if ci is None or co is None:
                continue
            val = (
                quandle.table[ci][co] if sigma > 0 else quandle.inverse_op(ci, co)
            )
            if colors[under_out] is None:
                colors[under_out] = val
            elif colors[under_out] != val:
                return False
        for a, b in caps:
            if colors[a] is not None and colors[b] is not None and colors[a] != colors[b]:
                return False
        return True

    def assign(po: int) -> None:
        nonlocal count
        if po > b2:
            # all determined pieces must be consistent and complete
            if propagate() and all(c is not None for c in colors):
                count += 1
            return
        for col in range(q):
            saved = colors[:]
            for ti in range(3):
                colors[bridge_piece[(ti, po)]] = col
            if propagate():
                assign(po + 1)
            colors[:] = saved

    assign(1)
    return count
