"""Congruences and invariant subloops: closures, quotients, derived series.

A congruence is an equivalence relation on a loop that is closed under the
componentwise operation on pairs.  All classes of a congruence have the same
size (right translations act on them), so a congruence is determined by the
class of the identity, its invariant subloop.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import CapExceeded, SubloopError, TheoremViolation
from .loops import (
    LoopHom,
    RightLoop,
    SubloopSet,
    classify,
    f_perm,
    group_torsion,
    hom_check,
    is_onto,
    is_subloop,
    loop_from_table,
    subloop_loop,
    subloop_set,
)
from .perms import PermGroup, Permutation

DEFAULT_LATTICE_CAP = 12


def _canonical_labels(class_of: Sequence[int]) -> tuple[int, ...]:
    """Relabel class ids in order of first appearance (element 0 gets label 0)."""
    relabel: dict[int, int] = {}
    out = []
    for c in class_of:
        if c not in relabel:
            relabel[c] = len(relabel)
        out.append(relabel[c])
    return tuple(out)


@dataclass(frozen=True)
class Congruence:
    loop: RightLoop
    class_id: tuple[int, ...]

    @property
    def num_classes(self) -> int:
        return max(self.class_id) + 1

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_classes)]
        for x, c in enumerate(self.class_id):
            out[c].append(x)
        return out

    def class_of(self, x: int) -> frozenset[int]:
        c = self.class_id[x]
        return frozenset(i for i, ci in enumerate(self.class_id) if ci == c)

    def same(self, a: int, b: int) -> bool:
        return self.class_id[a] == self.class_id[b]

    def pairs(self) -> list[tuple[int, int]]:
        n = len(self.class_id)
        return [
            (a, b)
            for a in range(n)
            for b in range(n)
            if self.class_id[a] == self.class_id[b]
        ]

    def is_diagonal(self) -> bool:
        return self.num_classes == len(self.class_id)

    def is_full(self) -> bool:
        return self.num_classes == 1

    def refines(self, other: "Congruence") -> bool:
        """True iff self, as a set of pairs, is contained in other."""
        seen: dict[int, int] = {}
        for c_self, c_other in zip(self.class_id, other.class_id):
            if c_self in seen:
                if seen[c_self] != c_other:
                    return False
            else:
                seen[c_self] = c_other
        return True


def diagonal_congruence(S: RightLoop) -> Congruence:
    return Congruence(S, tuple(range(S.n)))


def full_congruence(S: RightLoop) -> Congruence:
    return Congruence(S, (0,) * S.n)


def congruence_from_classes(S: RightLoop, classes: Iterable[Iterable[int]]) -> Congruence:
    class_of = [-1] * S.n
    for i, block in enumerate(classes):
        for x in block:
            if class_of[x] != -1:
                raise ValueError(f"element {x} appears in two classes")
            class_of[x] = i
    if any(c == -1 for c in class_of):
        raise ValueError("classes do not cover all elements")
    return Congruence(S, _canonical_labels(class_of))


def is_congruence(S: RightLoop, partition: Congruence | Iterable[Iterable[int]]) -> bool:
    """True iff the equivalence respects the componentwise operation."""
    cong = (
        partition
        if isinstance(partition, Congruence)
        else congruence_from_classes(S, partition)
    )
    cid = cong.class_id
    t = S.table
    n = S.n
    for block in cong.classes():
        first = block[0]
        for b in block[1:]:
            for c in range(n):
                if cid[t[first][c]] != cid[t[b][c]]:
                    return False
                if cid[t[c][first]] != cid[t[c][b]]:
                    return False
    return True


def congruence_closure(S: RightLoop, pairs: Iterable[tuple[int, int]]) -> Congruence:
    """Smallest congruence containing the given pairs.

    Union-find plus a worklist: each new merge (a, b) forces the merges
    (a o c, b o c) and (c o a, c o b) for every c.
    """
    n = S.n
    t = S.table
    parent = list(range(n))

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

    for a, b in pairs:
        union(a, b)
    while work:
        a, b = work.popleft()
        for c in range(n):
            union(t[a][c], t[b][c])
            union(t[c][a], t[c][b])
    return Congruence(S, _canonical_labels([find(x) for x in range(n)]))


def join(c1: Congruence, c2: Congruence) -> Congruence:
    base = [(block[0], b) for block in c2.classes() for b in block[1:]]
    merged = congruence_closure(c1.loop, base + [(block[0], b) for block in c1.classes() for b in block[1:]])
    return merged


def meet(c1: Congruence, c2: Congruence) -> Congruence:
    combined = [c1.class_id[x] * (max(c2.class_id) + 1) + c2.class_id[x] for x in range(c1.loop.n)]
    return Congruence(c1.loop, _canonical_labels(combined))


def invariant_from_congruence(c: Congruence) -> SubloopSet:
    """The class of the identity."""
    return subloop_set(c.loop, c.class_of(0))


def congruence_from_invariant(S: RightLoop, members: frozenset[int]) -> Congruence:
    """The relation pairing (x o y, y) for x in T, y in S, validated as a congruence.

    The trivial subloop {0} maps to the diagonal congruence.
    """
    if not is_subloop(S, members):
        raise SubloopError(f"{sorted(members)} is not a subloop")
    if members == frozenset([0]):
        return diagonal_congruence(S)
    n = S.n
    adj = [set([y]) for y in range(n)]
    for x in members:
        for y in range(n):
            adj[y].add(S.table[x][y])
    # the relation must already be an equivalence: classes T o y must either
    # coincide or be disjoint, and membership must be symmetric
    blocks: list[frozenset[int]] = []
    seen: set[int] = set()
    for y in range(n):
        if y in seen:
            continue
        block = frozenset(adj[y])
        for z in block:
            if frozenset(adj[z]) != block:
                raise SubloopError(
                    f"{sorted(members)} is not invariant: classes are not well defined"
                )
        blocks.append(block)
        seen |= block
    cong = congruence_from_classes(S, blocks)
    if not is_congruence(S, cong):
        raise SubloopError(f"{sorted(members)} is not invariant")
    return cong


def is_invariant_subloop(S: RightLoop, members: frozenset[int]) -> bool:
    try:
        congruence_from_invariant(S, members)
    except SubloopError:
        return False
    return True


def quotient_loop(S: RightLoop, c: Congruence) -> tuple[RightLoop, LoopHom]:
    """The quotient loop (classes ordered by minimal member) and the projection."""
    blocks = sorted(c.classes(), key=min)
    index_of_class = {}
    for i, block in enumerate(blocks):
        for x in block:
            index_of_class[x] = i
    reps = [min(block) for block in blocks]
    k = len(blocks)
    table = [[index_of_class[S.table[reps[i]][reps[j]]] for j in range(k)] for i in range(k)]
    # well-definedness: every representative pair must give the same class
    for i, bi in enumerate(blocks):
        for j, bj in enumerate(blocks):
            expected = table[i][j]
            for x in bi:
                for y in bj:
                    if index_of_class[S.table[x][y]] != expected:
                        raise TheoremViolation(
                            "quotient operation not well defined", (x, y)
                        )
    quotient = loop_from_table(table)
    nu = LoopHom(S, quotient, tuple(index_of_class[x] for x in range(S.n)))
    return quotient, nu


def _group_congruence_pairs(S: RightLoop) -> list[tuple[int, int]]:
    pairs = []
    for y in range(S.n):
        for z in range(S.n):
            p = f_perm(S, y, z)
            for x in range(S.n):
                if p(x) != x:
                    pairs.append((x, p(x)))
    return pairs


def smallest_group_congruence(S: RightLoop) -> Congruence:
    """Smallest congruence whose quotient is a group (associativity forced)."""
    cong = congruence_closure(S, _group_congruence_pairs(S))
    quotient, _ = quotient_loop(S, cong)
    if not classify(quotient).is_associative:
        raise TheoremViolation("group-congruence quotient is not associative")
    return cong


def smallest_abelian_congruence(S: RightLoop) -> Congruence:
    """Smallest congruence whose quotient is an abelian group."""
    pairs = _group_congruence_pairs(S)
    for x in range(S.n):
        for y in range(x + 1, S.n):
            pairs.append((S.table[x][y], S.table[y][x]))
    cong = congruence_closure(S, pairs)
    quotient, _ = quotient_loop(S, cong)
    if not classify(quotient).is_abelian_group:
        raise TheoremViolation("abelian-congruence quotient is not an abelian group")
    return cong


def derived_subloop(S: RightLoop) -> frozenset[int]:
    """Identity class of the smallest abelian congruence."""
    return smallest_abelian_congruence(S).class_of(0)


def derived_series_loop(S: RightLoop) -> tuple[list[frozenset[int]], bool]:
    """S >= S^(1) >= S^(2) >= ... as member sets of S, until stable."""
    series: list[frozenset[int]] = [frozenset(range(S.n))]
    while True:
        current = series[-1]
        if len(current) == 1:
            break
        sub, order = subloop_loop(S, current)
        nxt = frozenset(order[i] for i in derived_subloop(sub))
        if nxt == current:
            break
        series.append(nxt)
    return series, series[-1] == frozenset([0])


def is_solvable_loop(S: RightLoop) -> bool:
    return derived_series_loop(S)[1]


@dataclass(frozen=True, eq=False)
class CongruenceLattice:
    loop: RightLoop
    congruences: tuple[Congruence, ...]
    join_table: tuple[tuple[int, ...], ...]
    meet_table: tuple[tuple[int, ...], ...]

    def index_of(self, c: Congruence) -> int:
        return self.congruences.index(c)


def all_congruences(S: RightLoop, cap: int = DEFAULT_LATTICE_CAP) -> CongruenceLattice:
    """All congruences: principal ones closed under joins, plus the diagonal."""
    if S.n > cap:
        raise CapExceeded("congruence lattice", cap)
    found: dict[tuple[int, ...], Congruence] = {}

    def add(c: Congruence) -> bool:
        if c.class_id not in found:
            found[c.class_id] = c
            return True
        return False

    add(diagonal_congruence(S))
    principals = []
    for a in range(S.n):
        for b in range(a + 1, S.n):
            c = congruence_closure(S, [(a, b)])
            add(c)
            principals.append(c)
    changed = True
    while changed:
        changed = False
        current = sorted(found.values(), key=lambda c: c.class_id)
        for c1 in current:
            for c2 in current:
                if c1.class_id < c2.class_id:
                    if add(join(c1, c2)):
                        changed = True
    congruences = tuple(sorted(found.values(), key=lambda c: (-c.num_classes, c.class_id)))
    idx = {c.class_id: i for i, c in enumerate(congruences)}
    join_table = tuple(
        tuple(idx[join(c1, c2).class_id] for c2 in congruences) for c1 in congruences
    )
    meet_table = tuple(
        tuple(idx[meet(c1, c2).class_id] for c2 in congruences) for c1 in congruences
    )
    return CongruenceLattice(S, congruences, join_table, meet_table)


def invariant_subloops(S: RightLoop, cap: int = DEFAULT_LATTICE_CAP) -> list[frozenset[int]]:
    """Identity classes of all congruences, sorted by size then members."""
    lattice = all_congruences(S, cap=cap)
    subs = {c.class_of(0) for c in lattice.congruences}
    return sorted(subs, key=lambda s: (len(s), sorted(s)))


def image_invariant(h: LoopHom, members: frozenset[int]) -> SubloopSet:
    """Image of an invariant subloop under an onto homomorphism."""
    hom_check(h)
    if not is_onto(h):
        raise SubloopError("homomorphism is not onto")
    if not is_invariant_subloop(h.domain, members):
        raise SubloopError("input is not an invariant subloop of the domain")
    image = frozenset(h.mapping[x] for x in members)
    if not is_invariant_subloop(h.codomain, image):
        raise TheoremViolation("image of an invariant subloop is not invariant", sorted(image))
    return subloop_set(h.codomain, image)


def preimage_invariant(h: LoopHom, members: frozenset[int]) -> SubloopSet:
    """Preimage of an invariant subloop of the codomain."""
    hom_check(h)
    if not is_invariant_subloop(h.codomain, members):
        raise SubloopError("input is not an invariant subloop of the codomain")
    pre = frozenset(x for x in range(h.domain.n) if h.mapping[x] in members)
    if not is_invariant_subloop(h.domain, pre):
        raise TheoremViolation("preimage of an invariant subloop is not invariant", sorted(pre))
    return subloop_set(h.domain, pre)


def correspondence_check(h: LoopHom, cap: int = DEFAULT_LATTICE_CAP) -> bool:
    """Verify the image map is a bijection {invariant T >= ker h} -> {invariant T'}."""
    hom_check(h)
    if not is_onto(h):
        raise SubloopError("homomorphism is not onto")
    kernel = frozenset(x for x in range(h.domain.n) if h.mapping[x] == 0)
    above = [T for T in invariant_subloops(h.domain, cap) if kernel <= T]
    targets = set(invariant_subloops(h.codomain, cap))
    images = []
    for T in above:
        img = frozenset(h.mapping[x] for x in T)
        if img not in targets:
            return False
        images.append(img)
    return len(set(images)) == len(above) and set(images) == targets


@dataclass(frozen=True, eq=False)
class TorsionHom:
    """The torsion homomorphism induced by a congruence quotient."""

    loop: RightLoop
    congruence: Congruence
    domain: PermGroup
    quotient: RightLoop
    codomain: PermGroup
    mapping: dict
    kernel: PermGroup


def torsion_hom(S: RightLoop, c: Congruence) -> TorsionHom:
    """Map each torsion element to the permutation it induces on classes.

    The kernel is the set of torsion elements fixing every class setwise;
    the image is checked to be exactly the torsion of the quotient, and the
    order equation |G_S| = |kernel| * |G_quotient| is asserted.
    """
    torsion = group_torsion(S)
    quotient, nu = quotient_loop(S, c)
    qtorsion = group_torsion(quotient)
    mapping = {}
    for h in sorted(torsion.elements):
        images = [-1] * quotient.n
        for x in range(S.n):
            src = nu.mapping[x]
            dst = nu.mapping[h(x)]
            if images[src] == -1:
                images[src] = dst
            elif images[src] != dst:
                raise TheoremViolation(
                    "torsion element does not act on congruence classes", (h, x)
                )
        mapping[h] = Permutation(tuple(images))
    image = set(mapping.values())
    if image != set(qtorsion.elements):
        raise TheoremViolation(
            "induced torsion map is not onto the quotient torsion",
            {"image_size": len(image), "codomain_order": qtorsion.order},
        )
    ident = Permutation.identity(quotient.n)
    kernel_elems = [h for h, img in mapping.items() if img == ident]
    kernel = PermGroup.from_elements(S.n, kernel_elems, validate=False)
    if torsion.order != kernel.order * qtorsion.order:
        raise TheoremViolation(
            "torsion order does not split along the kernel",
            {"torsion": torsion.order, "kernel": kernel.order, "quotient": qtorsion.order},
        )
    return TorsionHom(S, c, torsion, quotient, qtorsion, mapping, kernel)
