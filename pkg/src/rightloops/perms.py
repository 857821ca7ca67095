"""Finite permutations and permutation groups stored by full element enumeration.

Composition convention for permutations: ``compose(p, q)`` applies ``p`` first,
then ``q``, i.e. ``compose(p, q)(x) = q(p(x))``; ``p * q`` is the same thing.

Coset machinery uses the textbook orientation in which the right coset ``Hx``
is the set of maps "apply x, then an element of H".  The two orientations are
exercised against each other by the transversal fixtures in the test suite.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    CapExceeded,
    DegreeMismatch,
    NotNormalError,
    ParseError,
    SubgroupError,
)

DEFAULT_ORDER_CAP = 10**6


@dataclass(frozen=True, order=True)
class Permutation:
    """A bijection of {0..n-1}; images[i] is where point i goes."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(n)):
            raise ValueError(f"not a permutation of 0..{n - 1}: {self.images}")

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, degree: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        images = list(range(degree))
        for cycle in cycles:
            for i, pt in enumerate(cycle):
                images[pt] = cycle[(i + 1) % len(cycle)]
        return cls(tuple(images))

    def __call__(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def moved_points(self) -> list[int]:
        return [i for i, j in enumerate(self.images) if i != j]

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its minimal point, sorted."""
        seen = [False] * len(self.images)
        out = []
        for start in range(len(self.images)):
            if seen[start] or self.images[start] == start:
                continue
            cyc = [start]
            seen[start] = True
            pt = self.images[start]
            while pt != start:
                cyc.append(pt)
                seen[pt] = True
                pt = self.images[pt]
            out.append(tuple(cyc))
        return out

    def cycle_string(self) -> str:
        """1-based disjoint-cycle notation, ``id`` for the identity."""
        cycles = self.cycles()
        if not cycles:
            return "id"
        return "".join("(" + ",".join(str(p + 1) for p in cyc) + ")" for cyc in cycles)

    def __repr__(self) -> str:
        return f"Permutation[{self.cycle_string()}]"


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Apply p first, then q: result(x) = q(p(x))."""
    if p.degree != q.degree:
        raise DegreeMismatch(f"degrees {p.degree} and {q.degree} differ")
    qi = q.images
    return Permutation(tuple(qi[i] for i in p.images))


_CYCLE_RE = re.compile(r"\(([0-9, ]*)\)")


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse 1-based disjoint-cycle notation like ``(1,3)(2,4)``; ``id`` allowed."""
    text = text.strip()
    if text in ("id", "()", "e"):
        return Permutation.identity(degree)
    consumed = _CYCLE_RE.sub("", text)
    if consumed.strip():
        raise ParseError(f"unrecognized cycle notation: {text!r}")
    cycles = []
    seen: set[int] = set()
    for match in _CYCLE_RE.finditer(text):
        body = match.group(1).strip()
        if not body:
            continue
        try:
            points = [int(tok) for tok in body.split(",")]
        except ValueError:
            raise ParseError(f"bad cycle {match.group(0)!r}") from None
        for pt in points:
            if not 1 <= pt <= degree:
                raise ParseError(f"point {pt} out of range 1..{degree}")
            if pt - 1 in seen:
                raise ParseError(f"point {pt} repeated; cycles must be disjoint")
            seen.add(pt - 1)
        if len(points) > 1:
            cycles.append([pt - 1 for pt in points])
    return Permutation.from_cycles(degree, cycles)


@dataclass(frozen=True)
class PermGroup:
    """A finite permutation group stored as its full element set."""

    degree: int
    generators: tuple[Permutation, ...]
    elements: frozenset[Permutation]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    def __contains__(self, p: Permutation) -> bool:
        return p in self.elements

    def __le__(self, other: "PermGroup") -> bool:
        return self.degree == other.degree and self.elements <= other.elements

    def sorted_elements(self) -> list[Permutation]:
        """Elements in lexicographic image order; the identity comes first."""
        return sorted(self.elements)

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_abelian(self) -> bool:
        gens = self.generators or tuple(self.elements)
        return all(a * b == b * a for a in gens for b in gens)

    @classmethod
    def trivial(cls, degree: int) -> "PermGroup":
        return cls(degree, (), frozenset([Permutation.identity(degree)]))

    @classmethod
    def generate(
        cls,
        degree: int,
        gens: Iterable[Permutation],
        max_order: int = DEFAULT_ORDER_CAP,
    ) -> "PermGroup":
        gens = tuple(gens)
        for g in gens:
            if g.degree != degree:
                raise DegreeMismatch(f"generator degree {g.degree}, expected {degree}")
        ident = Permutation.identity(degree)
        elements = {ident}
        frontier = [g for g in gens if g not in elements]
        elements.update(frontier)
        while frontier:
            new: list[Permutation] = []
            for a in frontier:
                for g in gens:
                    c = a * g
                    if c not in elements:
                        elements.add(c)
                        new.append(c)
                        if len(elements) > max_order:
                            raise CapExceeded("group closure", max_order)
            frontier = new
        return cls(degree, gens, frozenset(elements))

    @classmethod
    def from_elements(
        cls,
        degree: int,
        elements: Iterable[Permutation],
        generators: Optional[Sequence[Permutation]] = None,
        validate: bool = True,
    ) -> "PermGroup":
        elems = frozenset(elements)
        if validate:
            ident = Permutation.identity(degree)
            if ident not in elems:
                raise ValueError("element set lacks the identity")
            for a in elems:
                if a.inverse() not in elems:
                    raise ValueError(f"element set not closed under inverse: {a}")
            for a in elems:
                for b in elems:
                    if a * b not in elems:
                        raise ValueError("element set not closed under composition")
        gens = tuple(generators) if generators is not None else tuple(sorted(elems))
        return cls(degree, gens, elems)


def group_closure(
    degree: int, gens: Iterable[Permutation], max_order: int = DEFAULT_ORDER_CAP
) -> PermGroup:
    return PermGroup.generate(degree, gens, max_order=max_order)


def _require_subgroup(G: PermGroup, H: PermGroup) -> None:
    if not H <= G:
        raise SubgroupError("H is not a subgroup of G")


@dataclass(frozen=True, eq=False)
class CosetDecomposition:
    """Right cosets Hx of a subgroup, the subgroup's own coset first.

    Each coset is stored sorted; ``reps`` holds the lexicographically minimal
    element of each coset.  Non-subgroup cosets are ordered by their minimal
    element.
    """

    group: PermGroup
    subgroup: PermGroup
    cosets: tuple[tuple[Permutation, ...], ...]
    reps: tuple[Permutation, ...]
    _index: dict = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.cosets)

    def coset_index(self, g: Permutation) -> int:
        return self._index[g]


def right_cosets(G: PermGroup, H: PermGroup) -> CosetDecomposition:
    """Partition G into right cosets Hx = {x-then-h : h in H}."""
    _require_subgroup(G, H)
    index: dict[Permutation, int] = {}
    cosets: list[tuple[Permutation, ...]] = []
    h_elems = sorted(H.elements)
    remaining = set(G.elements)
    # subgroup's own coset first
    blocks = [tuple(h_elems)]
    remaining -= H.elements
    rest = []
    while remaining:
        g = min(remaining)
        block = tuple(sorted(compose(g, h) for h in h_elems))
        if not set(block) <= remaining:
            raise SubgroupError("cosets do not partition G; H is not a subgroup")
        remaining -= set(block)
        rest.append(block)
    rest.sort(key=lambda block: block[0].images)
    cosets = blocks + rest
    for i, block in enumerate(cosets):
        for g in block:
            index[g] = i
    reps = tuple(block[0] for block in cosets)
    return CosetDecomposition(G, H, tuple(cosets), reps, index)


def conjugate_subgroup(H: PermGroup, g: Permutation) -> frozenset[Permutation]:
    """The element set of g^-1 H g."""
    gi = g.inverse()
    return frozenset(compose(compose(g, h), gi) for h in H.elements)


def core(G: PermGroup, H: PermGroup) -> tuple[PermGroup, bool]:
    """Largest normal subgroup of G inside H, plus a core-free flag."""
    _require_subgroup(G, H)
    elems = set(H.elements)
    for g in G.elements:
        elems &= conjugate_subgroup(H, g)
        if len(elems) == 1:
            break
    grp = PermGroup.from_elements(G.degree, elems, validate=False)
    return grp, grp.order == 1


def commutator(a: Permutation, b: Permutation) -> Permutation:
    return a.inverse() * b.inverse() * a * b


def derived_subgroup(G: PermGroup) -> PermGroup:
    gens = sorted({commutator(a, b) for a in G.elements for b in G.elements})
    return PermGroup.generate(G.degree, gens, max_order=G.order)


def derived_series_group(G: PermGroup) -> tuple[list[PermGroup], bool]:
    """G >= G' >= G'' >= ... until stable; solvable iff the last term is trivial."""
    series = [G]
    while True:
        nxt = derived_subgroup(series[-1])
        if nxt.order == series[-1].order:
            break
        series.append(nxt)
        if nxt.order == 1:
            break
    return series, series[-1].order == 1


def center_group(G: PermGroup) -> PermGroup:
    gens = G.generators or tuple(G.elements)
    elems = [z for z in G.elements if all(z * g == g * z for g in gens)]
    return PermGroup.from_elements(G.degree, elems, validate=False)


def normalizer(G: PermGroup, H: PermGroup) -> PermGroup:
    _require_subgroup(G, H)
    elems = [g for g in G.elements if conjugate_subgroup(H, g) == H.elements]
    return PermGroup.from_elements(G.degree, elems, validate=False)


def is_normal(G: PermGroup, N: PermGroup) -> bool:
    _require_subgroup(G, N)
    gens = G.generators or tuple(G.elements)
    return all(conjugate_subgroup(N, g) == N.elements for g in gens)


@dataclass(frozen=True, eq=False)
class GroupHom:
    """A homomorphism given by its full image table.

    ``mapping`` sends each domain element to a permutation of the codomain
    degree.  Products follow the right-action pattern: the image of the
    product "apply b, then a" is ``mapping[a] * mapping[b]``.
    """

    domain: PermGroup
    codomain_degree: int
    mapping: dict

    def __call__(self, g: Permutation) -> Permutation:
        return self.mapping[g]

    def image_group(self) -> PermGroup:
        return PermGroup.from_elements(
            self.codomain_degree, set(self.mapping.values()), validate=False
        )

    def image_of(self, elems: Iterable[Permutation]) -> frozenset[Permutation]:
        return frozenset(self.mapping[g] for g in elems)

    def kernel(self) -> PermGroup:
        ident = Permutation.identity(self.codomain_degree)
        elems = [g for g in self.domain.elements if self.mapping[g] == ident]
        return PermGroup.from_elements(self.domain.degree, elems, validate=False)

    def check(self) -> bool:
        ident_in = Permutation.identity(self.domain.degree)
        if not self.mapping[ident_in].is_identity():
            return False
        for a in self.domain.elements:
            for b in self.domain.elements:
                if self.mapping[compose(b, a)] != compose(self.mapping[a], self.mapping[b]):
                    return False
        return True


def coset_action(
    G: PermGroup, H: PermGroup, decomposition: Optional[CosetDecomposition] = None
) -> GroupHom:
    """Action of G on the right cosets of H; kernel equals core(G, H)."""
    dec = decomposition if decomposition is not None else right_cosets(G, H)
    mapping = {}
    for g in G.elements:
        images = tuple(dec.coset_index(compose(g, rep)) for rep in dec.reps)
        mapping[g] = Permutation(images)
    return GroupHom(G, dec.count, mapping)


def quotient_group(G: PermGroup, N: PermGroup) -> PermGroup:
    """G/N materialized as the image of the coset action (faithful since N is the kernel)."""
    if not is_normal(G, N):
        raise NotNormalError("N is not normal in G")
    return coset_action(G, N).image_group()


def cyclic_subgroups(G: PermGroup) -> list[frozenset[Permutation]]:
    seen: set[frozenset[Permutation]] = set()
    for g in G.elements:
        elems = {G.identity}
        p = g
        while p != G.identity:
            elems.add(p)
            p = p * g
        seen.add(frozenset(elems))
    return sorted(seen, key=lambda s: (len(s), sorted(p.images for p in s)))


def all_subgroups(G: PermGroup, cap: int = 200) -> list[PermGroup]:
    """Every subgroup of G, found by closing unions of pairs of known subgroups.

    Complete because any subgroup is generated by finitely many cyclic ones.
    Only sensible for small G; guarded by the cap on |G|.
    """
    if G.order > cap:
        raise CapExceeded("subgroup enumeration", cap)
    found: set[frozenset[Permutation]] = set(cyclic_subgroups(G))
    worklist = sorted(found, key=lambda s: (len(s), sorted(p.images for p in s)))
    while True:
        new: set[frozenset[Permutation]] = set()
        pool = sorted(found, key=lambda s: (len(s), sorted(p.images for p in s)))
        for a, b in itertools.combinations(pool, 2):
            if a <= b or b <= a:
                continue
            gens = sorted(a | b)
            closed = PermGroup.generate(G.degree, gens, max_order=G.order).elements
            if closed not in found:
                new.add(closed)
        if not new:
            break
        found |= new
    return [
        PermGroup.from_elements(G.degree, elems, validate=False)
        for elems in sorted(found, key=lambda s: (len(s), sorted(p.images for p in s)))
    ]


def frattini(G: PermGroup, cap: int = 200) -> PermGroup:
    """Intersection of all maximal proper subgroups of G."""
    subs = all_subgroups(G, cap=cap)
    proper = [S.elements for S in subs if S.order < G.order]
    maximal = [
        s for s in proper if not any(s < t for t in proper)
    ]
    elems = set(G.elements)
    for m in maximal:
        elems &= m
    return PermGroup.from_elements(G.degree, elems, validate=False)


def upper_central_series_group(G: PermGroup) -> list[PermGroup]:
    """Ascending central series {1} <= Z1 <= Z2 <= ... until stable."""
    series = [PermGroup.trivial(G.degree)]
    while True:
        Z = series[-1]
        if Z.order == G.order:
            break
        hom = coset_action(G, Z)
        img = hom.image_group()
        center_img = center_group(img)
        nxt_elems = [g for g in G.elements if hom(g) in center_img.elements]
        nxt = PermGroup.from_elements(G.degree, nxt_elems, validate=False)
        if nxt.order == Z.order:
            break
        series.append(nxt)
    return series


def nilpotency_class_group(G: PermGroup) -> Optional[int]:
    series = upper_central_series_group(G)
    if series[-1].order != G.order:
        return None
    return len(series) - 1


def is_p_group(G: PermGroup) -> tuple[bool, Optional[int]]:
    n = G.order
    if n == 1:
        return True, None
    p = 2
    while p * p <= n:
        if n % p == 0:
            break
        p += 1
    else:
        p = n
    while n % p == 0:
        n //= p
    return n == 1, p if n == 1 else None
