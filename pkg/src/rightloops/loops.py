"""Right loops given by Cayley tables with the identity pinned at index 0.

A right loop is a magma with a two-sided identity in which every equation
X o a = b has a unique solution: equivalently, every column of the table
(each right translation) is a bijection.  Rows need not be bijections.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import (
    IdentityColumnViolated,
    IdentityRowViolated,
    NotAHomomorphism,
    NotSquare,
    RightTranslationNotBijective,
    SubloopError,
    TheoremViolation,
)
from .perms import PermGroup, Permutation, compose


@dataclass(frozen=True)
class RightLoop:
    table: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.table)

    def op(self, x: int, y: int) -> int:
        return self.table[x][y]

    @functools.cached_property
    def _column_inverse(self) -> tuple[tuple[int, ...], ...]:
        # inv[a][b] = the unique x with x o a = b
        n = self.n
        inv = [[0] * n for _ in range(n)]
        for a in range(n):
            for x in range(n):
                inv[a][self.table[x][a]] = x
        return tuple(tuple(row) for row in inv)

    def elements(self) -> range:
        return range(self.n)

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(map(str, row)) for row in self.table)
        return f"RightLoop[{rows}]"


def loop_from_table(rows: Sequence[Sequence[int]]) -> RightLoop:
    """Validate a candidate table and wrap it as a RightLoop."""
    n = len(rows)
    table = []
    for row in rows:
        if len(row) != n:
            raise NotSquare(f"{len(row)} entries in a row of an order-{n} table")
        for v in row:
            if not 0 <= int(v) < n:
                raise NotSquare(f"entry {v} out of range 0..{n - 1}")
        table.append(tuple(int(v) for v in row))
    for y in range(n):
        if table[0][y] != y:
            raise IdentityRowViolated(f"0 o {y} = {table[0][y]}, expected {y}")
    for x in range(n):
        if table[x][0] != x:
            raise IdentityColumnViolated(f"{x} o 0 = {table[x][0]}, expected {x}")
    for y in range(n):
        if len({table[x][y] for x in range(n)}) != n:
            raise RightTranslationNotBijective(y)
    return RightLoop(tuple(table))


def right_divide(S: RightLoop, b: int, a: int) -> int:
    """The unique x with x o a = b."""
    return S._column_inverse[a][b]


def right_translation(S: RightLoop, x: int) -> Permutation:
    """The bijection t -> t o x."""
    return Permutation(tuple(S.table[t][x] for t in range(S.n)))


def f_perm(S: RightLoop, y: int, z: int) -> Permutation:
    """The map sending x to the unique solution of X o (y o z) = (x o y) o z."""
    yz = S.table[y][z]
    col = S._column_inverse[yz]
    return Permutation(tuple(col[S.table[S.table[x][y]][z]] for x in range(S.n)))


def torsion_generators(S: RightLoop) -> list[Permutation]:
    gens = []
    seen = set()
    for y in range(S.n):
        for z in range(S.n):
            p = f_perm(S, y, z)
            if p not in seen:
                seen.add(p)
                gens.append(p)
    return gens


def group_torsion(S: RightLoop) -> PermGroup:
    """Group generated by all f_perm(S, y, z); trivial iff S is a group."""
    return PermGroup.generate(S.n, torsion_generators(S))


def gss_group(S: RightLoop) -> PermGroup:
    """Group generated by the torsion together with all right translations.

    Also verifies that the translations form a transversal of the torsion:
    the order splits as |G_SS| = n * |G_S| and the translations fall into
    pairwise distinct torsion cosets.
    """
    torsion = group_torsion(S)
    translations = [right_translation(S, x) for x in range(S.n)]
    gens = list(torsion.generators) + translations
    gss = PermGroup.generate(S.n, gens)
    if gss.order != S.n * torsion.order:
        raise TheoremViolation(
            "translations do not form a transversal of the torsion",
            {"gss_order": gss.order, "torsion_order": torsion.order, "n": S.n},
        )
    for x in range(S.n):
        for y in range(x + 1, S.n):
            if compose(translations[x], translations[y].inverse()) in torsion.elements:
                raise TheoremViolation(
                    "two right translations share a torsion coset", (x, y)
                )
    return gss


@dataclass(frozen=True)
class LoopProperties:
    is_associative: bool
    is_commutative: bool
    is_group: bool
    is_abelian_group: bool


def classify(S: RightLoop) -> LoopProperties:
    """Brute-force associativity/commutativity scan."""
    n = S.n
    t = S.table
    assoc = all(
        t[t[x][y]][z] == t[x][t[y][z]]
        for x in range(n)
        for y in range(n)
        for z in range(n)
    )
    comm = all(t[x][y] == t[y][x] for x in range(n) for y in range(x + 1, n))
    return LoopProperties(assoc, comm, assoc, assoc and comm)


@dataclass(frozen=True)
class SubloopSet:
    """A subset of a loop closed under the induced operation, containing 0."""

    loop: RightLoop
    members: frozenset[int]


def is_subloop(S: RightLoop, members: frozenset[int]) -> bool:
    if 0 not in members:
        return False
    return all(S.table[x][y] in members for x in members for y in members)


def subloop_set(S: RightLoop, members: frozenset[int]) -> SubloopSet:
    if not is_subloop(S, members):
        raise SubloopError(f"{sorted(members)} is not closed under the operation")
    return SubloopSet(S, members)


def subloop_loop(S: RightLoop, members: frozenset[int]) -> tuple[RightLoop, tuple[int, ...]]:
    """Re-index a subloop as a standalone loop; returns it with the member order."""
    order = tuple(sorted(members))
    pos = {m: i for i, m in enumerate(order)}
    if not is_subloop(S, members):
        raise SubloopError(f"{sorted(members)} is not closed under the operation")
    table = [[pos[S.table[a][b]] for b in order] for a in order]
    return loop_from_table(table), order


@dataclass(frozen=True)
class LoopHom:
    """A map between loops given by its value table."""

    domain: RightLoop
    codomain: RightLoop
    mapping: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.mapping[x]


def hom_check(h: LoopHom) -> None:
    if len(h.mapping) != h.domain.n:
        raise NotAHomomorphism((-1, -1))
    if h.mapping[0] != 0:
        raise NotAHomomorphism((0, 0))
    for x in range(h.domain.n):
        for y in range(h.domain.n):
            if h.mapping[h.domain.table[x][y]] != h.codomain.table[h.mapping[x]][h.mapping[y]]:
                raise NotAHomomorphism((x, y))


def hom_validate(h: LoopHom) -> bool:
    try:
        hom_check(h)
    except NotAHomomorphism:
        return False
    return True


def hom_kernel(h: LoopHom) -> SubloopSet:
    hom_check(h)
    members = frozenset(x for x in range(h.domain.n) if h.mapping[x] == 0)
    return subloop_set(h.domain, members)


def hom_image(h: LoopHom) -> SubloopSet:
    hom_check(h)
    members = frozenset(h.mapping)
    return subloop_set(h.codomain, members)


def is_onto(h: LoopHom) -> bool:
    return len(set(h.mapping)) == h.codomain.n


def direct_product(S1: RightLoop, S2: RightLoop) -> RightLoop:
    """Componentwise product; (x1, x2) is indexed as x1 * n2 + x2."""
    n1, n2 = S1.n, S2.n
    table = [
        [
            S1.table[x1][y1] * n2 + S2.table[x2][y2]
            for y1 in range(n1)
            for y2 in range(n2)
        ]
        for x1 in range(n1)
        for x2 in range(n2)
    ]
    return loop_from_table(table)


def loops_isomorphic(S1: RightLoop, S2: RightLoop) -> Optional[tuple[int, ...]]:
    """First isomorphism in lexicographic order (as a value tuple), or None.

    Backtracking over bijections fixing the identity, pruning on any table
    mismatch among already-assigned elements.
    """
    if S1.n != S2.n:
        return None
    n = S1.n
    image: list[int] = [-1] * n
    used = [False] * n
    image[0] = 0
    used[0] = True

    def consistent(k: int) -> bool:
        for a in range(k + 1):
            if image[a] < 0:
                continue
            for b in range(k + 1):
                if image[b] < 0:
                    continue
                c = S1.table[a][b]
                d = S2.table[image[a]][image[b]]
                if image[c] >= 0:
                    if image[c] != d:
                        return False
                elif used[d]:
                    return False
        return True

    def backtrack(k: int) -> bool:
        if k == n:
            return True
        for v in range(n):
            if used[v]:
                continue
            image[k] = v
            used[v] = True
            if consistent(k) and backtrack(k + 1):
                return True
            image[k] = -1
            used[v] = False
        return False

    if backtrack(1):
        return tuple(image)
    return None


def cayley_loop(G: PermGroup) -> tuple[RightLoop, tuple[Permutation, ...]]:
    """The Cayley table of a group as a right loop, plus the element order used.

    Entry [i][j] is the index of the product "apply element j, then element i",
    the same orientation the coset machinery uses for products in G.
    """
    order = tuple(G.sorted_elements())
    pos = {g: i for i, g in enumerate(order)}
    table = [[pos[compose(b, a)] for b in order] for a in order]
    return loop_from_table(table), order


def cyclic_loop(n: int) -> RightLoop:
    return loop_from_table([[(i + j) % n for j in range(n)] for i in range(n)])


@functools.lru_cache(maxsize=8)
def all_loops_of_order(n: int) -> tuple[RightLoop, ...]:
    """Every right-loop table of order n with identity 0, in lexicographic order.

    Column y ranges over the bijections of {0..n-1} whose row-0 entry is y;
    there are ((n-1)!)**(n-1) tables.
    """
    others = list(range(n))
    column_choices: list[list[tuple[int, ...]]] = []
    for y in range(1, n):
        rest = [v for v in others if v != y]
        cols = []
        for perm in itertools.permutations(rest):
            cols.append((y,) + perm)
        column_choices.append(cols)
    loops = []
    for combo in itertools.product(*column_choices):
        table = [[x if y == 0 else combo[y - 1][x] for y in range(n)] for x in range(n)]
        loops.append(RightLoop(tuple(tuple(row) for row in table)))
    return tuple(loops)
