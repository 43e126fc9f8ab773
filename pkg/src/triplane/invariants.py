"""Normal Euler number by three routes, plus the Goeritz/signature machinery.

Route 1: e = w1 + w2 + w3 (pair writhes).
Route 2: e = sum of signed RI counts from uncrossing certificates.
Route 3: e = 2(sigma(G1) + sigma(G2) + sigma(G3)) for compatibly shaded
checkerboard surfaces; compatibility is automatic for the slot-parity
shading, which restricts identically to the shared tangle of consecutive
pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .diagram import CertifiedUnlink, Over, StructureError, TriPlaneDiagram, orient
from .diagram import component_partition, euler_characteristic
from .pairing import PairedDiagram, pair


def writhe(paired: PairedDiagram, strict: bool = True) -> int:
    return paired.writhe(strict=strict)


@dataclass(frozen=True)
class GoeritzData:
    matrix: tuple[tuple[int, ...], ...]
    eta: int
    signature: int
    black_parity: int


def goeritz_data(paired: PairedDiagram, black_parity: int = 1) -> GoeritzData:
    """Goeritz matrix and correction term for one checkerboard surface.

    ``black_parity`` selects the spanning surface: 1 shades the regions an
    odd number of strands from the outside (the unbounded region stays
    unshaded), 0 shades the complementary family.
    """

    reg = paired.region_data()
    white = [r for r in range(reg.region_count) if reg.shading[r] != black_parity]
    index = {r: i for i, r in enumerate(white)}
    n = len(white)
    full = [[0] * n for _ in range(n)]
    eta = 0
    for c, quad in zip(paired.crossings, reg.quadrants):
        w, s, e, nq = quad
        black_is_ns = reg.shading[s] == black_parity
        # epsilon = +1 iff the black pair is swept counterclockwise from the
        # over-line to the under-line; over LEFT means the over-strand is
        # the NE-moving diagonal.
        ccw = black_is_ns if c.over is Over.LEFT else not black_is_ns
        eps = 1 if ccw else -1
        if eps * c.sign == 1:  # type II crossing
            eta += c.sign
        u, v = (w, e) if black_is_ns else (s, nq)
        if u != v:
            full[index[u]][index[v]] -= eps
            full[index[v]][index[u]] -= eps
    for i in range(n):
        full[i][i] = -sum(full[i][j] for j in range(n) if j != i)
    drop = index.get(reg.outer, n - 1)
    matrix = [
        [full[i][j] for j in range(n) if j != drop]
        for i in range(n)
        if i != drop
    ]
    sig = signature_symmetric(matrix)
    return GoeritzData(tuple(tuple(r) for r in matrix), eta, sig, black_parity)


def signature_symmetric(matrix: list[list[int]]) -> int:
    """Signature of a symmetric integer matrix by exact congruence."""

    n = len(matrix)
    a = [[Fraction(matrix[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        assert all(a[i][j] == a[j][i] for j in range(n)), "matrix not symmetric"
    sig = 0
    i = 0
    while i < n:
        piv = next((j for j in range(i, n) if a[j][j] != 0), None)
        if piv is None:
            spot = next(
                (
                    (j, k)
                    for j in range(i, n)
                    for k in range(j + 1, n)
                    if a[j][k] != 0
                ),
                None,
            )
            if spot is None:
                break
            j, k = spot
            for t in range(n):
                a[j][t] += a[k][t]
            for t in range(n):
                a[t][j] += a[t][k]
            continue
        if piv != i:
            a[i], a[piv] = a[piv], a[i]
            for row in a:
                row[i], row[piv] = row[piv], row[i]
        d = a[i][i]
        sig += 1 if d > 0 else -1
        for j in range(i + 1, n):
            f = a[j][i] / d
            if f:
                for t in range(n):
                    a[j][t] -= f * a[i][t]
                for t in range(n):
                    a[t][j] -= f * a[t][i]
        i += 1
    return sig


@dataclass(frozen=True)
class EulerReport:
    w: tuple[int, int, int]
    e_total: int
    e_per_component: tuple[int, ...]
    congruence_ok: bool
    massey_ok: bool | None  # None = not applicable


def euler_number(diagram: TriPlaneDiagram) -> EulerReport:
    """Normal Euler number from pair writhes, with congruence/range checks."""

    pairs = [pair(diagram, i) for i in range(3)]
    ws = tuple(p.writhe(strict=True) for p in pairs)
    e_total = sum(ws)
    partition = component_partition(diagram)
    per = [0] * len(partition)
    for p in pairs:
        strand_comp = p.strand_surface_component(partition)
        for comp, s in p.self_writhe_by_strand_class(
            lambda sid, sc=strand_comp: sc[sid]
        ).items():
            per[comp] += s
    if sum(per) != e_total:
        raise StructureError("per-component Euler numbers fail to sum to total")
    congruence_ok: bool
    massey_ok: bool | None
    if diagram.all_certified:
        chi = euler_characteristic(diagram)
        congruence_ok = (e_total - 2 * chi) % 4 == 0
        orientable = orient(diagram) is not None
        if len(partition) == 1 and not orientable:
            massey_ok = congruence_ok and abs(e_total) <= 4 - 2 * chi
        else:
            massey_ok = None
    else:
        raise StructureError("euler_number requires all three pairs certified")
    return EulerReport(ws, e_total, tuple(per), congruence_ok, massey_ok)


def euler_via_branch_points(diagram: TriPlaneDiagram) -> int:
    """Euler number from the certificates' signed RI counts.

    Each certificate's (removed positive) - (removed negative) count equals
    the pair writhe, so the three together recover the Euler number.
    """

    total = 0
    for i, st in enumerate(diagram.certification):
        if not isinstance(st, CertifiedUnlink):
            raise StructureError(f"pair {i + 1} has no uncrossing certificate")
        total += st.certificate.branch_sum
    return total


@dataclass(frozen=True)
class GoeritzCrosscheck:
    signatures: tuple[int, int, int]
    etas: tuple[int, int, int]
    e_check: int


def goeritz_crosscheck(diagram: TriPlaneDiagram) -> GoeritzCrosscheck:
    """e = 2(sigma(G1)+sigma(G2)+sigma(G3)) with the parity shading.

    For certified unlink pairs sigma(G_i) must equal eta_i, since the
    unlink has signature zero; this is asserted.
    """

    if not diagram.all_certified:
        raise StructureError("goeritz_crosscheck requires certified pairs")
    sigs = []
    etas = []
    for i in range(3):
        gd = goeritz_data(pair(diagram, i))
        if gd.signature != gd.eta:
            raise StructureError(
                f"pair {i + 1}: sigma(G)={gd.signature} != eta={gd.eta}; "
                "diagram cannot be an unlink"
            )
        sigs.append(gd.signature)
        etas.append(gd.eta)
    return GoeritzCrosscheck(tuple(sigs), tuple(etas), 2 * sum(sigs))


def link_signature(paired: PairedDiagram, black_parity: int = 1) -> int:
    """Signature of the underlying link via Gordon-Litherland."""

    gd = goeritz_data(paired, black_parity)
    return gd.signature - gd.eta
