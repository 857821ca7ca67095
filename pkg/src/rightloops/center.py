"""Centering congruences, the center, upper central series, and torsion kernels.

A congruence gamma centralizes a congruence beta when there is a "centering
congruence" Delta on the pair algebra of beta satisfying five conditions:

  (i)   Delta-related pairs have gamma-related first coordinates;
  (ii)  each Delta-class projects bijectively onto the gamma-class of the
        first coordinate of any of its members;
  (iii) (x, x) Delta (y, y) whenever x gamma y;
  (iv)  Delta is closed under swapping both pairs;
  (v)   Delta composes: (x,y) ~ (u,v) and (y,z) ~ (v,w) imply (x,z) ~ (u,w).

The smallest candidate is generated from the (iii) pairs, closed as a
congruence of the pair algebra and under (iv) and (v).  Any centering
congruence contains it, it inherits (i) and the injectivity half of (ii),
and it always satisfies the surjectivity half, so checking this single
candidate decides existence; the brute-force oracle below rechecks that
claim exhaustively on small loops.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Optional

from .errors import CapExceeded, NotNilpotent, TheoremViolation
from .congruences import (
    Congruence,
    DEFAULT_LATTICE_CAP,
    all_congruences,
    congruence_closure,
    congruence_from_invariant,
    derived_series_loop,
    diagonal_congruence,
    full_congruence,
    is_congruence,
    join,
    quotient_loop,
    torsion_hom,
)
from .loops import (
    RightLoop,
    classify,
    group_torsion,
    loop_from_table,
    right_divide,
    subloop_loop,
)
from .perms import PermGroup, Permutation
from .verdicts import Verdict


@dataclass(frozen=True, eq=False)
class PairAlgebra:
    """A congruence's pair set as a right loop under the componentwise operation."""

    loop: RightLoop
    beta: Congruence
    pairs: tuple[tuple[int, int], ...]
    pair_loop: RightLoop
    index: dict
    swap: tuple[int, ...]


def pair_algebra(S: RightLoop, beta: Congruence) -> PairAlgebra:
    pairs = tuple(sorted(beta.pairs()))
    index = {p: i for i, p in enumerate(pairs)}
    m = len(pairs)
    table = [
        [index[(S.table[a[0]][b[0]], S.table[a[1]][b[1]])] for b in pairs]
        for a in pairs
    ]
    pair_loop = loop_from_table(table)
    swap = tuple(index[(b, a)] for a, b in pairs)
    return PairAlgebra(S, beta, pairs, pair_loop, index, swap)


@dataclass(frozen=True, eq=False)
class CenteringRelation:
    algebra: PairAlgebra
    class_id: tuple[int, ...]

    def same(self, i: int, j: int) -> bool:
        return self.class_id[i] == self.class_id[j]

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(max(self.class_id) + 1)]
        for i, c in enumerate(self.class_id):
            out[c].append(i)
        return out


def delta_closure(S: RightLoop, beta: Congruence, gamma: Congruence) -> CenteringRelation:
    """Smallest congruence of the pair algebra containing the (iii) generators
    and closed under the swap and composition rules."""
    pa = pair_algebra(S, beta)
    m = len(pa.pairs)
    t = pa.pair_loop.table
    parent = list(range(m))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    work: deque[tuple[int, int]] = deque()

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
            work.append((a, b))

    for x in range(S.n):
        for y in range(S.n):
            if gamma.same(x, y):
                union(pa.index[(x, x)], pa.index[(y, y)])

    by_first: list[list[int]] = [[] for _ in range(S.n)]
    for i, (a, _) in enumerate(pa.pairs):
        by_first[a].append(i)

    while True:
        while work:
            a, b = work.popleft()
            for c in range(m):
                union(t[a][c], t[b][c])
                union(t[c][a], t[c][b])
            union(pa.swap[a], pa.swap[b])
        # composition rule needs a global pass; repeat until stable
        roots: dict[int, list[int]] = {}
        for i in range(m):
            roots.setdefault(find(i), []).append(i)
        merged = False
        for block in roots.values():
            for i in block:
                x, y = pa.pairs[i]
                for j in block:
                    u, v = pa.pairs[j]
                    for k in by_first[y]:
                        _, z = pa.pairs[k]
                        rk = find(k)
                        for l in roots[rk]:
                            if pa.pairs[l][0] != v:
                                continue
                            w = pa.pairs[l][1]
                            p = pa.index[(x, z)]
                            q = pa.index[(u, w)]
                            if find(p) != find(q):
                                union(p, q)
                                merged = True
        if not merged and not work:
            break

    labels: dict[int, int] = {}
    out = []
    for i in range(m):
        r = find(i)
        if r not in labels:
            labels[r] = len(labels)
        out.append(labels[r])
    return CenteringRelation(pa, tuple(out))


@dataclass(frozen=True)
class CentralityCheck:
    ok: bool
    failed_condition: Optional[str]
    witness: Any


def _check_conditions(
    S: RightLoop, gamma: Congruence, relation: CenteringRelation
) -> CentralityCheck:
    """Literal verification of conditions (i) through (v) for a candidate Delta."""
    pa = relation.algebra
    pairs = pa.pairs
    blocks = relation.classes()
    # (i) first coordinates of a Delta-class are gamma-related
    for block in blocks:
        x0 = pairs[block[0]][0]
        for i in block[1:]:
            if not gamma.same(x0, pairs[i][0]):
                return CentralityCheck(False, "i", (pairs[block[0]], pairs[i]))
    # (ii) each class projects bijectively onto the gamma-class of its first coords
    for block in blocks:
        firsts = [pairs[i][0] for i in block]
        gamma_class = sorted(gamma.class_of(firsts[0]))
        if sorted(firsts) != gamma_class:
            return CentralityCheck(False, "ii", pairs[block[0]])
    # (iii) generators present
    for x in range(S.n):
        for y in range(S.n):
            if gamma.same(x, y):
                if not relation.same(pa.index[(x, x)], pa.index[(y, y)]):
                    return CentralityCheck(False, "iii", (x, y))
    # (iv) closed under swap
    for block in blocks:
        root = relation.class_id[pa.swap[block[0]]]
        for i in block[1:]:
            if relation.class_id[pa.swap[i]] != root:
                return CentralityCheck(False, "iv", pairs[i])
    # (v) composition
    by_first: dict[int, list[int]] = {}
    for i, (a, _) in enumerate(pairs):
        by_first.setdefault(a, []).append(i)
    for block in blocks:
        for i in block:
            x, y = pairs[i]
            for j in block:
                u, v = pairs[j]
                for k in by_first.get(y, ()):
                    _, z = pairs[k]
                    for l in blocks[relation.class_id[k]]:
                        if pairs[l][0] != v:
                            continue
                        w = pairs[l][1]
                        if not relation.same(pa.index[(x, z)], pa.index[(u, w)]):
                            return CentralityCheck(
                                False, "v", ((x, y), (u, v), (y, z), (v, w))
                            )
    return CentralityCheck(True, None, None)


def is_centralized(S: RightLoop, beta: Congruence, gamma: Congruence) -> CentralityCheck:
    """Decide whether gamma centralizes beta via the generated candidate."""
    relation = delta_closure(S, beta, gamma)
    return _check_conditions(S, gamma, relation)


def centering_exists_bruteforce(
    S: RightLoop, beta: Congruence, gamma: Congruence, cap: int = 40
) -> bool:
    """Oracle: search every congruence of the pair algebra for one satisfying
    the five conditions."""
    pa = pair_algebra(S, beta)
    lattice = all_congruences(pa.pair_loop, cap=cap)
    for cand in lattice.congruences:
        relation = CenteringRelation(pa, cand.class_id)
        if _check_conditions(S, gamma, relation).ok:
            return True
    return False


def center_congruence(S: RightLoop, cap: int = DEFAULT_LATTICE_CAP) -> Congruence:
    """Join of all principal congruences centralized by the full congruence.

    The result is re-checked to be central, and the identity class is checked
    to commute and associate as the center must; failures raise
    TheoremViolation rather than being assumed away.
    """
    if S.n > cap:
        raise CapExceeded("center computation", cap)
    full = full_congruence(S)
    zeta = diagonal_congruence(S)
    for a in range(S.n):
        for b in range(a + 1, S.n):
            principal = congruence_closure(S, [(a, b)])
            if is_centralized(S, principal, full).ok:
                zeta = join(zeta, principal)
    if not zeta.is_diagonal():
        check = is_centralized(S, zeta, full)
        if not check.ok:
            raise TheoremViolation(
                "join of central congruences is not central", check.witness
            )
    members = zeta.class_of(0)
    t = S.table
    for x in members:
        for y in range(S.n):
            if t[x][y] != t[y][x]:
                raise TheoremViolation("center element does not commute", (x, y))
            for z in range(S.n):
                if t[x][t[y][z]] != t[t[x][y]][z]:
                    raise TheoremViolation("center element does not associate", (x, y, z))
    sub, _ = subloop_loop(S, members)
    if not classify(sub).is_abelian_group:
        raise TheoremViolation("center is not an abelian group", sorted(members))
    return zeta


def center_set(S: RightLoop, cap: int = DEFAULT_LATTICE_CAP) -> frozenset[int]:
    return center_congruence(S, cap=cap).class_of(0)


@dataclass(frozen=True, eq=False)
class CentralSeries:
    loop: RightLoop
    subloops: tuple[frozenset[int], ...]
    nilpotent: bool

    @property
    def nilpotency_class(self) -> Optional[int]:
        return len(self.subloops) - 1 if self.nilpotent else None


def upper_central_series(S: RightLoop, cap: int = DEFAULT_LATTICE_CAP) -> CentralSeries:
    """Z_0 = {0}, Z_{i+1} = preimage of the center of S / Z_i, until stable."""
    subloops: list[frozenset[int]] = [frozenset([0])]
    while True:
        current = subloops[-1]
        if len(current) == S.n:
            return CentralSeries(S, tuple(subloops), True)
        cong = congruence_from_invariant(S, current)
        quotient, nu = quotient_loop(S, cong)
        zq = center_set(quotient, cap=cap)
        nxt = frozenset(x for x in range(S.n) if nu.mapping[x] in zq)
        if nxt == current:
            return CentralSeries(S, tuple(subloops), False)
        subloops.append(nxt)


def is_nilpotent(S: RightLoop, cap: int = DEFAULT_LATTICE_CAP) -> bool:
    return upper_central_series(S, cap=cap).nilpotent


def nilpotency_class(S: RightLoop, cap: int = DEFAULT_LATTICE_CAP) -> Optional[int]:
    return upper_central_series(S, cap=cap).nilpotency_class


def nilpotent_implies_solvable_check(S: RightLoop) -> Verdict:
    """If S is nilpotent, check solvability and the inclusions S^(i) <= Z_{n-i}."""
    series = upper_central_series(S)
    if not series.nilpotent:
        return Verdict("nilpotent-implies-solvable", "inconclusive", {"nilpotent": False})
    derived, solvable = derived_series_loop(S)
    if not solvable:
        raise TheoremViolation("nilpotent loop is not solvable", S.table)
    n = len(series.subloops) - 1
    for i, term in enumerate(derived):
        j = n - i
        if j < 0:
            if term != frozenset([0]):
                raise TheoremViolation("derived series too long", i)
            continue
        if not term <= series.subloops[j]:
            raise TheoremViolation(
                "derived term escapes the central series", {"i": i, "term": sorted(term)}
            )
    return Verdict(
        "nilpotent-implies-solvable",
        "pass",
        {"class": n, "derived_length": len(derived) - 1},
    )


@dataclass(frozen=True, eq=False)
class EtaEmbedding:
    loop: RightLoop
    kernel: PermGroup
    coset_reps: tuple[int, ...]
    eta: dict
    verdict: Verdict


def eta_embedding(S: RightLoop, cap: int = DEFAULT_LATTICE_CAP) -> EtaEmbedding:
    """Embed the kernel of the center-quotient torsion map into a power of the center.

    Each kernel element h satisfies h(x_i) = z_i o x_i with z_i in the center,
    for coset representatives x_i (minimal index per center coset, identity
    coset excluded); eta(h) collects the z_i.  Injectivity, the homomorphism
    law and the (k-1)-factor count are all asserted.
    """
    zeta = center_congruence(S, cap=cap)
    center = zeta.class_of(0)
    th = torsion_hom(S, zeta)
    kernel = th.kernel
    blocks = sorted(zeta.classes(), key=min)
    reps = tuple(min(b) for b in blocks if 0 not in b)
    k = len(blocks)
    if len(reps) != k - 1:
        raise TheoremViolation("coset count mismatch", {"classes": k, "reps": len(reps)})
    eta: dict[Permutation, tuple[int, ...]] = {}
    for h in sorted(kernel.elements):
        zs = []
        for x in reps:
            z = right_divide(S, h(x), x)
            if z not in center:
                raise TheoremViolation(
                    "kernel element shift is not central", {"x": x, "z": z}
                )
            for u in center:
                if h(S.table[u][x]) != S.table[u][h(x)]:
                    raise TheoremViolation(
                        "kernel element does not commute with central shifts", (u, x)
                    )
            zs.append(z)
        eta[h] = tuple(zs)
    if len(set(eta.values())) != kernel.order:
        raise TheoremViolation("eta is not injective", None)
    for a in sorted(kernel.elements):
        for b in sorted(kernel.elements):
            ab = a * b
            expected = tuple(S.table[eta[a][i]][eta[b][i]] for i in range(len(reps)))
            if eta[ab] != expected:
                raise TheoremViolation("eta is not a homomorphism", (eta[a], eta[b]))
    verdict = Verdict(
        "eta-embedding",
        "pass",
        {
            "kernel_order": kernel.order,
            "center_order": len(center),
            "factors": len(reps),
        },
    )
    return EtaEmbedding(S, kernel, reps, eta, verdict)


@dataclass(frozen=True, eq=False)
class KernelSeries:
    loop: RightLoop
    groups: tuple[PermGroup, ...]
    verdict: Verdict


def kernel_series(S: RightLoop, cap: int = DEFAULT_LATTICE_CAP) -> KernelSeries:
    """The ascending torsion-kernel series attached to the central series.

    Ker_j collects the torsion elements fixing every class of Z_j setwise.
    The chain must ascend from the trivial group to the full torsion with
    abelian quotients, each member of Ker_{j+1} must induce on S/Z_j an
    element of the center-quotient kernel there, with fibers exactly the
    cosets of Ker_j, and the torsion must come out solvable.
    """
    series = upper_central_series(S, cap=cap)
    if not series.nilpotent:
        raise NotNilpotent("kernel series requires a nilpotent loop")
    torsion = group_torsion(S)
    congruences = [congruence_from_invariant(S, Z) for Z in series.subloops]
    groups: list[PermGroup] = []
    for cong in congruences[:-1] if len(congruences) > 1 else congruences:
        elems = [
            h
            for h in torsion.elements
            if all(cong.same(h(x), x) for x in range(S.n))
        ]
        groups.append(PermGroup.from_elements(S.n, elems, validate=False))
    if groups[0].order != 1:
        raise TheoremViolation("kernel series does not start trivial", groups[0].order)
    if groups[-1].elements != torsion.elements:
        raise TheoremViolation(
            "kernel series does not reach the torsion",
            {"last": groups[-1].order, "torsion": torsion.order},
        )
    for j in range(len(groups) - 1):
        lower, upper = groups[j], groups[j + 1]
        if not lower <= upper:
            raise TheoremViolation("kernel series is not ascending", j)
        for a in upper.elements:
            for b in upper.elements:
                if a.inverse() * b.inverse() * a * b not in lower.elements:
                    raise TheoremViolation("kernel series quotient is not abelian", j)
        # members of the upper kernel act on S / Z_j inside that quotient's
        # center-quotient kernel, with fibers the cosets of the lower kernel
        quotient, nu = quotient_loop(S, congruences[j])
        qkernel = torsion_hom(quotient, center_congruence(quotient, cap=cap)).kernel
        induced: dict[Permutation, Permutation] = {}
        for h in sorted(upper.elements):
            images = [-1] * quotient.n
            for x in range(S.n):
                src, dst = nu.mapping[x], nu.mapping[h(x)]
                if images[src] not in (-1, dst):
                    raise TheoremViolation(
                        "kernel element does not act on quotient classes", {"j": j}
                    )
                images[src] = dst
            q = Permutation(tuple(images))
            if q not in qkernel.elements:
                raise TheoremViolation(
                    "induced element escapes the quotient kernel", {"j": j}
                )
            induced[h] = q
        fibers = len(set(induced.values()))
        if fibers * lower.order != upper.order:
            raise TheoremViolation(
                "induced map fibers are not the lower-kernel cosets",
                {"j": j, "fibers": fibers},
            )
    from .perms import derived_series_group

    _, torsion_solvable = derived_series_group(torsion)
    if not torsion_solvable:
        raise TheoremViolation("torsion of a nilpotent loop is not solvable", None)
    verdict = Verdict(
        "kernel-series",
        "pass",
        {"lengths": [g.order for g in groups], "torsion_order": torsion.order},
    )
    return KernelSeries(S, tuple(groups), verdict)
