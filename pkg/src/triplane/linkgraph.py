"""4-valent crossing graph of a closed link diagram, with Reidemeister moves.

Ports 0..3 are counterclockwise around each crossing with port 0 the
incoming under-strand (so even ports are under, odd ports are over).  The
adjacency is an involution on (crossing, port) pairs; components with no
crossings are tracked as a bare count of free loops.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import Over
from .pairing import PairedDiagram

# geometric corner names, counterclockwise
_CCW = ("SE", "NE", "NW", "SW")
_OPP = {"SE": "NW", "NW": "SE", "SW": "NE", "NE": "SW"}

Port = tuple[int, int]


@dataclass
class LinkGraph:
    signs: dict[int, int]
    adj: dict[Port, Port]
    free_loops: int = 0
    next_id: int = 0

    # -- construction -------------------------------------------------------

    @classmethod
    def from_paired(cls, paired: PairedDiagram) -> "LinkGraph":
        signs: dict[int, int] = {}
        port_of_corner: dict[tuple[int, str], Port] = {}
        for ci, c in enumerate(paired.crossings):
            signs[ci] = c.sign
            over_id = c.left_in if c.over is Over.LEFT else c.right_in
            under_id = c.right_in if c.over is Over.LEFT else c.left_in
            # geometric corners: NE-mover enters SW exits NE; NW-mover SE->NW
            if under_id == c.right_in:  # under is the NW-mover
                u_in_corner = "SE" if paired.up[under_id] else "NW"
            else:
                u_in_corner = "SW" if paired.up[under_id] else "NE"
            base = _CCW.index(u_in_corner)
            for i in range(4):
                port_of_corner[(ci, _CCW[(base + i) % 4])] = (ci, i)
        # trace strand connections between corners
        edges: list[tuple[object, object]] = []
        dangling: list[object] = []
        joins: list[tuple[object, object]] = []
        fresh = 0
        ci = 0
        for ev in paired.word:
            if ev.kind == "bridge":
                continue
            k = ev.pos
            if ev.kind == "cup":
                t1, t2 = ("cup", fresh), ("cup", fresh + 1)
                fresh += 2
                joins.append((t1, t2))
                dangling[k - 1 : k - 1] = [t1, t2]
            elif ev.kind == "cross":
                edges.append((dangling[k - 1], ("corner", ci, "SW")))
                edges.append((dangling[k], ("corner", ci, "SE")))
                dangling[k - 1] = ("corner", ci, "NW")
                dangling[k] = ("corner", ci, "NE")
                ci += 1
            else:
                edges.append((dangling[k - 1], dangling[k]))
                del dangling[k - 1 : k + 1]
        # contract cup tokens: tokens have degree 2 (one join, one edge)
        link: dict[object, list[object]] = {}
        for a, b in edges + joins:
            link.setdefault(a, []).append(b)
            link.setdefault(b, []).append(a)
        adj: dict[Port, Port] = {}
        free_loops = 0
        seen: set[object] = set()

        def corner_port(tok) -> Port:
            return port_of_corner[(tok[1], tok[2])]

        for tok in list(link):
            if tok in seen or tok[0] != "corner":
                continue
            # walk from this corner through cup tokens to the far corner
            prev = tok
            seen.add(tok)
            cur = link[tok][0]
            while cur[0] != "corner":
                seen.add(cur)
                neighbors = link[cur]
                nxt = neighbors[1] if neighbors[0] == prev else neighbors[0]
                prev, cur = cur, nxt
            seen.add(cur)
            a, b = corner_port(tok), corner_port(cur)
            adj[a] = b
            adj[b] = a
        # pure cup cycles (components with no crossings)
        for tok in link:
            if tok in seen or tok[0] == "corner":
                continue
            free_loops += 1
            prev, cur = tok, link[tok][0]
            seen.add(tok)
            while cur != tok:
                seen.add(cur)
                neighbors = link[cur]
                nxt = neighbors[1] if neighbors[0] == prev else neighbors[0]
                prev, cur = cur, nxt
        g = cls(signs, adj, free_loops, next_id=len(paired.crossings))
        g._check()
        return g

    def _check(self) -> None:
        for (c, p), (d, q) in self.adj.items():
            assert self.adj[(d, q)] == (c, p)
        for c in self.signs:
            for p in range(4):
                assert (c, p) in self.adj, (c, p)

    def copy(self) -> "LinkGraph":
        return LinkGraph(dict(self.signs), dict(self.adj), self.free_loops, self.next_id)

    @property
    def n_crossings(self) -> int:
        return len(self.signs)

    def components(self) -> int:
        seen: set[int] = set()
        comps = 0
        for c in self.signs:
            for p in (0, 1):
                if (c, p) in seen:
                    continue
                comps += 1
                cur = (c, p)
                while cur not in seen:
                    seen.add(cur)
                    out = (cur[0], (cur[1] + 2) % 4)
                    seen.add(out)
                    cur = self.adj[out]
        return comps + self.free_loops

    # -- deletion with pass-through ----------------------------------------

    def delete_passthrough(self, removed: set[int]) -> None:
        reattach: dict[Port, Port] = {}
        visited: set[Port] = set()

        def walk(start: Port) -> Port | None:
            # start: port of a removed crossing reached from outside
            cur = start
            while True:
                visited.add(cur)
                out = (cur[0], (cur[1] + 2) % 4)
                visited.add(out)
                nxt = self.adj[out]
                if nxt[0] not in removed:
                    return nxt
                cur = nxt

        for c in list(self.signs):
            if c in removed:
                continue
            for p in range(4):
                tgt = self.adj[(c, p)]
                if tgt[0] in removed:
                    end = walk(tgt)
                    if end is not None:
                        reattach[(c, p)] = end
        # cycles fully inside removed crossings become free loops
        for c in removed:
            for p in range(4):
                if (c, p) in visited:
                    continue
                self.free_loops += 1
                cur = (c, p)
                while cur not in visited:
                    visited.add(cur)
                    out = (cur[0], (cur[1] + 2) % 4)
                    visited.add(out)
                    cur = self.adj[out]
        for c in removed:
            del self.signs[c]
            for p in range(4):
                self.adj.pop((c, p), None)
        for a, b in reattach.items():
            self.adj[a] = b
        for a, b in reattach.items():
            assert self.adj[b] == a, "pass-through reattachment mismatch"

    # -- move sites ----------------------------------------------------------

    def ri_sites(self) -> list[tuple[int, int]]:
        sites = []
        for c in sorted(self.signs):
            for p in range(4):
                if self.adj[(c, p)] == (c, (p + 1) % 4):
                    sites.append((c, p))
                    break
        return sites

    def apply_ri(self, site: tuple[int, int]) -> int:
        c, p = site
        assert self.adj[(c, p)] == (c, (p + 1) % 4), "not an RI loop"
        sign = self.signs[c]
        self.delete_passthrough({c})
        return sign

    def rii_sites(self) -> list[tuple[int, int, int, int]]:
        sites = []
        for a in sorted(self.signs):
            for pa in range(4):
                b, pb = self.adj[(a, pa)]
                if b == a or b < a:
                    continue
                b2, pb2 = self.adj[(a, (pa + 1) % 4)]
                if b2 == b and pb2 == (pb - 1) % 4 and (pa + pb) % 2 == 0:
                    sites.append((a, pa, b, pb))
        return sites

    def apply_rii(self, site: tuple[int, int, int, int]) -> None:
        a, pa, b, pb = site
        assert self.adj[(a, pa)] == (b, pb)
        assert self.adj[(a, (pa + 1) % 4)] == (b, (pb - 1) % 4)
        assert (pa + pb) % 2 == 0
        assert self.signs[a] == -self.signs[b], "RII pair with equal signs"
        self.delete_passthrough({a, b})

    def faces(self) -> list[list[tuple[Port, Port]]]:
        """Faces as lists of edges ((c, leaving port), (d, arriving port))."""

        out: list[list[tuple[Port, Port]]] = []
        seen: set[Port] = set()
        for c in sorted(self.signs):
            for p in range(4):
                if (c, p) in seen:
                    continue
                face: list[tuple[Port, Port]] = []
                cur = (c, p)
                while cur not in seen:
                    seen.add(cur)
                    arr = self.adj[cur]
                    face.append((cur, arr))
                    cur = (arr[0], (arr[1] - 1) % 4)
                out.append(face)
        return out

    def riii_sites(self) -> list[tuple]:
        """Admissible triangular faces, as triples of triangle edges."""

        sites = []
        for face in self.faces():
            if len(face) != 3:
                continue
            crossings = [e[0][0] for e in face]
            if len(set(crossings)) != 3:
                continue
            # admissible iff one strand is over at both its corners,
            # i.e. some side has equal port parity at both ends
            if not any(px % 2 == py % 2 for (_, px), (_, py) in face):
                continue
            sites.append(tuple(face))
        return sites

    def apply_riii(self, site: tuple) -> None:
        """Flip the triangle: crossing order swaps along all three lines.

        Implemented as a relocation of edge endpoints on the twelve ports
        of the triangle crossings, which handles strands that connect the
        triangle crossings to each other outside the triangle.
        """

        relocate: dict[Port, Port] = {}
        for (x, xp), (y, yp) in site:
            relocate[(x, xp)] = (x, (xp + 2) % 4)
            relocate[(x, (xp + 2) % 4)] = (y, yp)
            relocate[(y, yp)] = (y, (yp + 2) % 4)
            relocate[(y, (yp + 2) % 4)] = (x, xp)
        new_pairs = []
        done: set[Port] = set()
        for a, b in list(self.adj.items()):
            if a in done:
                continue
            done.add(a)
            done.add(b)
            new_pairs.append((relocate.get(a, a), relocate.get(b, b)))
        for a, b in new_pairs:
            self.adj[a] = b
            self.adj[b] = a

    # -- canonical code -------------------------------------------------------

    def canonical_code(self) -> tuple:
        if not self.signs:
            return (self.free_loops,)
        best = None
        ids = sorted(self.signs)
        for root in ids:
            order = {root: 0}
            queue = [root]
            qi = 0
            while qi < len(queue):
                c = queue[qi]
                qi += 1
                for p in range(4):
                    d = self.adj[(c, p)][0]
                    if d not in order:
                        order[d] = len(order)
                        queue.append(d)
            if len(order) < len(ids):
                # disconnected: code per component, combine below
                pass
            code = []
            for c in queue:
                row = [self.signs[c]]
                for p in range(4):
                    d, q = self.adj[(c, p)]
                    row.append((order.get(d, -1), q))
                code.append(tuple(row))
            code_t = tuple(code)
            if best is None or code_t < best:
                best = code_t
        return (self.free_loops, best)


@dataclass
class MoveRecord:
    kind: str  # "RI" | "RII" | "RIII"
    site: tuple
    sign: int = 0  # for RI: sign of the removed crossing


@dataclass
class SearchBudget:
    nodes: int = 200_000
    depth: int = 16


@dataclass
class SearchOutcome:
    certificate_moves: list[MoveRecord] | None
    nodes_used: int
    exhausted: bool


def _cascade(g: LinkGraph, log: list[MoveRecord]) -> None:
    while True:
        rii = g.rii_sites()
        if rii:
            site = rii[0]
            g.apply_rii(site)
            log.append(MoveRecord("RII", site))
            continue
        ri = g.ri_sites()
        if ri:
            site = ri[0]
            sign = g.apply_ri(site)
            log.append(MoveRecord("RI", site, sign))
            continue
        return


def search_uncrossing(g0: LinkGraph, budget: SearchBudget) -> SearchOutcome:
    """Iterative deepening over RIII moves with greedy RI/RII cascades."""

    nodes = 0
    exhausted = False

    def attempt(max_riii: int) -> list[MoveRecord] | None:
        nonlocal nodes, exhausted
        memo: dict[tuple, int] = {}

        def dfs(g: LinkGraph, log: list[MoveRecord], riii_left: int):
            nonlocal nodes, exhausted
            nodes += 1
            if nodes > budget.nodes:
                exhausted = True
                return None
            work = g.copy()
            local: list[MoveRecord] = []
            _cascade(work, local)
            if work.n_crossings == 0:
                return log + local
            code = work.canonical_code()
            if memo.get(code, -1) >= riii_left:
                return None
            memo[code] = riii_left
            if riii_left == 0:
                return None
            for site in work.riii_sites():
                nxt = work.copy()
                nxt.apply_riii(site)
                res = dfs(nxt, log + local + [MoveRecord("RIII", site)], riii_left - 1)
                if res is not None:
                    return res
                if exhausted:
                    return None
            return None

        return dfs(g0, [], max_riii)

    for depth in range(budget.depth + 1):
        result = attempt(depth)
        if result is not None:
            return SearchOutcome(result, nodes, exhausted)
        if exhausted:
            break
    return SearchOutcome(None, nodes, exhausted)


def fox_count_link(g: LinkGraph, p: int) -> int:
    """Number of Fox p-colorings of the closed diagram (arcs = over-runs)."""

    # union edges through over-passes: arc variable per maximal over-run
    parent: dict[Port, Port] = {}

    def find(x: Port) -> Port:
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    def union(x: Port, y: Port) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    # identify the two endpoints of each edge, and over-in with over-out
    for a, b in g.adj.items():
        union(a, b)
    for c in g.signs:
        union((c, 1), (c, 3))
    arcs: dict[Port, int] = {}
    for c in g.signs:
        for port in [(c, 0), (c, 1), (c, 2), (c, 3)]:
            r = find(port)
            if r not in arcs:
                arcs[r] = len(arcs)
    rows = []
    for c in g.signs:
        x = arcs[find((c, 0))]
        z = arcs[find((c, 2))]
        y = arcs[find((c, 1))]
        row = [0] * len(arcs)
        row[x] += 1
        row[z] += 1
        row[y] -= 2
        rows.append([v % p for v in row])
    rank = _rank_mod_p(rows, len(arcs), p)
    return p ** (len(arcs) - rank + g.free_loops)


def _rank_mod_p(rows: list[list[int]], ncols: int, p: int) -> int:
    rank = 0
    rows = [r[:] for r in rows]
    for col in range(ncols):
        piv = None
        for r in range(rank, len(rows)):
            if rows[r][col] % p:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [(v * inv) % p for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [(a - f * b) % p for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank
