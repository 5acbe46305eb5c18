"""Exact algebra of subsets, set families, filters and relations on finite ground sets.

Everything downstream reduces to this module.  Subsets of a ground set of
n named points (n <= 16) are bitmasks, a family of sets is the antichain of
its inclusion-minimal members together with up-closure semantics, and a
filter is the up-closure of a single kernel set.

That last representation is a theorem, not a convenience: an isotone,
finite-intersection-closed family on a finite set always equals kernel^up
for kernel = the intersection of all its members.  The harness suite
``principal-filters`` re-proves this by enumeration.  The degenerate filter
(the whole powerset) is the kernel-empty case and is a first-class value:
it meshes nothing, and images of it are degenerate.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Iterator, Sequence

MAX_POINTS = 16


class GroundMismatchError(ValueError):
    """Raised when operands live on different ground sets."""


class NotAMapError(ValueError):
    """Raised when a map-only operation receives a non-functional relation."""


@dataclass(frozen=True)
class GroundSet:
    """Ordered finite set of named points; iteration order is fixed."""

    elements: tuple[str, ...]

    def __post_init__(self) -> None:
        if not 1 <= len(self.elements) <= MAX_POINTS:
            raise ValueError(f"ground set size must be 1..{MAX_POINTS}")
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("ground set names must be unique")

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def index(self, name: str) -> int:
        try:
            return self.elements.index(name)
        except ValueError:
            raise KeyError(f"unknown point {name!r}") from None

    def mask_of(self, names: Iterable[str]) -> int:
        m = 0
        for name in names:
            m |= 1 << self.index(name)
        return m

    def names_of(self, mask: int) -> tuple[str, ...]:
        return tuple(e for i, e in enumerate(self.elements) if mask >> i & 1)

    def subset(self, *names: str) -> Subset:
        return Subset(self, self.mask_of(names))

    def subset_from_mask(self, mask: int) -> Subset:
        return Subset(self, mask)

    def all_masks(self) -> range:
        """Every subset mask, ascending (so A <= B numerically when A <= B as sets)."""
        return range(self.full_mask + 1)


def ground(*names: str) -> GroundSet:
    return GroundSet(tuple(names))


def _check_same_ground(a: GroundSet, b: GroundSet) -> None:
    if a != b:
        raise GroundMismatchError(f"mixed ground sets: {a.elements} vs {b.elements}")


@dataclass(frozen=True)
class Subset:
    """A subset of a ground set, stored as a bitmask over the low n bits."""

    ground: GroundSet
    mask: int

    def __post_init__(self) -> None:
        if self.mask & ~self.ground.full_mask:
            raise ValueError("mask uses bits outside the ground set")

    def __and__(self, other: Subset) -> Subset:
        _check_same_ground(self.ground, other.ground)
        return Subset(self.ground, self.mask & other.mask)

    def __or__(self, other: Subset) -> Subset:
        _check_same_ground(self.ground, other.ground)
        return Subset(self.ground, self.mask | other.mask)

    def __sub__(self, other: Subset) -> Subset:
        _check_same_ground(self.ground, other.ground)
        return Subset(self.ground, self.mask & ~other.mask)

    def __invert__(self) -> Subset:
        return Subset(self.ground, self.ground.full_mask & ~self.mask)

    def __le__(self, other: Subset) -> bool:
        _check_same_ground(self.ground, other.ground)
        return self.mask & ~other.mask == 0

    def __contains__(self, name: str) -> bool:
        return bool(self.mask >> self.ground.index(name) & 1)

    def __iter__(self) -> Iterator[str]:
        return iter(self.ground.names_of(self.mask))

    def __bool__(self) -> bool:
        return self.mask != 0

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __repr__(self) -> str:
        return "{" + ",".join(self) + "}"


def minimize(masks: Iterable[int]) -> tuple[int, ...]:
    """Inclusion-minimal elements of a set of masks, sorted ascending.

    Relies on subset-implies-numerically-smaller: an ascending scan only has
    to test new masks against already kept ones.
    """
    keep: list[int] = []
    for m in sorted(set(masks)):
        if not any(k & m == k for k in keep):
            keep.append(m)
    return tuple(keep)


@dataclass(frozen=True)
class FamilyOfSets:
    """Isotone family of subsets, represented by the antichain of its minimal members.

    The represented family is the up-closure of ``minimals``.  The empty
    antichain is the empty family; the antichain (0,) is the whole powerset
    (the degenerate family).
    """

    ground: GroundSet
    minimals: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.minimals != minimize(self.minimals):
            raise ValueError("minimals must be a sorted antichain")
        for m in self.minimals:
            if m & ~self.ground.full_mask:
                raise ValueError("member mask outside ground set")

    @property
    def is_empty(self) -> bool:
        return not self.minimals

    @property
    def is_degenerate(self) -> bool:
        return self.minimals == (0,)

    def contains(self, mask: int) -> bool:
        return any(k & mask == k for k in self.minimals)

    def members(self) -> Iterator[int]:
        """All member masks, ascending (2^n scan)."""
        for m in self.ground.all_masks():
            if self.contains(m):
                yield m

    def mesh(self, other: FamilyOfSets) -> bool:
        """A#B: every member of A meets every member of B.

        Vacuously true when either family is empty; false whenever a family
        contains the empty set (nothing meets it).
        """
        _check_same_ground(self.ground, other.ground)
        return all(a & b for a in self.minimals for b in other.minimals)

    def grill(self) -> FamilyOfSets:
        """All sets meeting every member; involutive on isotone families.

        Brute force over the powerset: exponential in n, which is the point
        at harness scale (n <= 4).
        """
        hitting = [b for b in self.ground.all_masks()
                   if all(b & m for m in self.minimals)]
        return FamilyOfSets(self.ground, minimize(hitting))


def up_close(subsets: Sequence[Subset]) -> FamilyOfSets:
    """Up-closure of a list of subsets, normalized to its minimal antichain."""
    if not subsets:
        raise ValueError("cannot infer a ground set from an empty list; "
                         "use family(ground) for the empty family")
    g = subsets[0].ground
    for s in subsets[1:]:
        _check_same_ground(g, s.ground)
    return FamilyOfSets(g, minimize(s.mask for s in subsets))


def family(g: GroundSet, *masks: int) -> FamilyOfSets:
    return FamilyOfSets(g, minimize(masks))


@dataclass(frozen=True)
class Filter:
    """The filter kernel^up on a finite ground set; kernel 0 is the degenerate filter."""

    ground: GroundSet
    kernel: int

    def __post_init__(self) -> None:
        if self.kernel & ~self.ground.full_mask:
            raise ValueError("kernel mask outside ground set")

    @property
    def is_degenerate(self) -> bool:
        return self.kernel == 0

    def as_family(self) -> FamilyOfSets:
        return FamilyOfSets(self.ground, (self.kernel,))

    def members(self) -> Iterator[int]:
        k = self.kernel
        for m in self.ground.all_masks():
            if k & m == k:
                yield m

    def __repr__(self) -> str:
        return "{" + ",".join(self.ground.names_of(self.kernel)) + "}^up"


def principal(g: GroundSet, *names: str) -> Filter:
    return Filter(g, g.mask_of(names))


def point_filter(g: GroundSet, name: str) -> Filter:
    return Filter(g, 1 << g.index(name))


def degenerate(g: GroundSet) -> Filter:
    return Filter(g, 0)


def finer(f: Filter, g: Filter) -> bool:
    """True iff F >= G (F contains G as a family), i.e. kernel(F) <= kernel(G)."""
    _check_same_ground(f.ground, g.ground)
    return f.kernel & ~g.kernel == 0


def meet(f: Filter, g: Filter) -> Filter:
    """Infimum F wedge G: kernel is the union of kernels."""
    _check_same_ground(f.ground, g.ground)
    return Filter(f.ground, f.kernel | g.kernel)


def join(f: Filter, g: Filter) -> Filter:
    """Supremum F vee G: kernel is the intersection (degenerate when disjoint)."""
    _check_same_ground(f.ground, g.ground)
    return Filter(f.ground, f.kernel & g.kernel)


def filter_equiv(f: Filter, g: Filter) -> bool:
    _check_same_ground(f.ground, g.ground)
    return f.kernel == g.kernel


def mesh(f: Filter | FamilyOfSets, g: Filter | FamilyOfSets) -> bool:
    """Mesh of filters or families.  For filters: kernels intersect.

    Degenerate filters mesh nothing (the empty set meets no set), which the
    kernel test gives for free.
    """
    if isinstance(f, Filter) and isinstance(g, Filter):
        _check_same_ground(f.ground, g.ground)
        return f.kernel & g.kernel != 0
    fa = f.as_family() if isinstance(f, Filter) else f
    ga = g.as_family() if isinstance(g, Filter) else g
    return fa.mesh(ga)


def family_op_image(op: Callable[[int], int], a: FamilyOfSets | Filter) -> FamilyOfSets:
    """Image family {op(A) : A in family}, minimized.

    ``op`` need not be monotone (one-step adherence is not), so it is
    applied to every represented member, not only to minimals.
    """
    fam = a.as_family() if isinstance(a, Filter) else a
    return FamilyOfSets(fam.ground, minimize(op(m) for m in fam.members()))


# --- relations ---------------------------------------------------------------


@dataclass(frozen=True)
class Relation:
    """Relation between two ground sets, stored as one codomain mask per domain point."""

    domain: GroundSet
    codomain: GroundSet
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.domain.size:
            raise ValueError("one row per domain point required")
        for r in self.rows:
            if r & ~self.codomain.full_mask:
                raise ValueError("row mask outside codomain")

    def image(self, mask: int) -> int:
        out = 0
        m = mask
        while m:
            i = (m & -m).bit_length() - 1
            out |= self.rows[i]
            m &= m - 1
        return out

    def preimage(self, mask: int) -> int:
        return sum(1 << i for i, r in enumerate(self.rows) if r & mask)

    def inverse(self) -> Relation:
        rows = tuple(self.preimage(1 << j) for j in range(self.codomain.size))
        return Relation(self.codomain, self.domain, rows)

    def is_total(self) -> bool:
        return all(self.rows)

    def is_single_valued(self) -> bool:
        return all(r.bit_count() <= 1 for r in self.rows)

    def is_map(self) -> bool:
        return self.is_total() and self.is_single_valued()

    def is_surjective(self) -> bool:
        return self.image(self.domain.full_mask) == self.codomain.full_mask

    def apply(self, i: int) -> int:
        """Domain point index -> codomain point index; map-only."""
        r = self.rows[i]
        if r.bit_count() != 1:
            raise NotAMapError("relation is not functional at "
                               f"{self.domain.elements[i]!r}")
        return r.bit_length() - 1

    def __repr__(self) -> str:
        parts = ",".join(
            f"{x}->{{{','.join(self.codomain.names_of(r))}}}"
            for x, r in zip(self.domain.elements, self.rows))
        return f"Rel({parts})"


def relation(domain: GroundSet, codomain: GroundSet,
             graph: dict[str, str | Iterable[str]]) -> Relation:
    """Build a relation from a name -> name(s) mapping; missing names give empty rows."""
    rows = []
    for x in domain.elements:
        v = graph.get(x, ())
        names = (v,) if isinstance(v, str) else tuple(v)
        rows.append(codomain.mask_of(names))
    return Relation(domain, codomain, rows)


def identity_relation(g: GroundSet) -> Relation:
    return Relation(g, g, tuple(1 << i for i in range(g.size)))


def require_map(r: Relation) -> Relation:
    if not r.is_map():
        raise NotAMapError("a total single-valued relation is required")
    return r


def rel_image(h: Relation | Filter, f: Filter) -> Filter:
    """Image filter HF.  H may be a fixed relation or a filter on a product ground.

    kernel(HF) = H(kernel F); degenerate in, degenerate out.
    """
    rel = h if isinstance(h, Relation) else pair_mask_to_relation(h)
    _check_same_ground(rel.domain, f.ground)
    return Filter(rel.codomain, rel.image(f.kernel))


def rel_preimage(h: Relation | Filter, g: Filter) -> Filter:
    """Preimage filter H^-(G), kernel H^-(kernel G)."""
    rel = h if isinstance(h, Relation) else pair_mask_to_relation(h)
    _check_same_ground(rel.codomain, g.ground)
    return Filter(rel.domain, rel.preimage(g.kernel))


# --- product grounds (carriers for filters on X x Y) -------------------------


def product_ground(gx: GroundSet, gy: GroundSet) -> GroundSet:
    """Ground set of pairs, row-major: index(x,y) = ix*|Y| + iy."""
    names = tuple(f"({x},{y})" for x in gx.elements for y in gy.elements)
    return GroundSet(names)


def pair_index(gx: GroundSet, gy: GroundSet, ix: int, iy: int) -> int:
    return ix * gy.size + iy


def relation_to_pair_mask(r: Relation) -> int:
    mask = 0
    for ix, row in enumerate(r.rows):
        mask |= row << (ix * r.codomain.size)
    return mask


def relation_to_pair_filter(r: Relation) -> Filter:
    return Filter(product_ground(r.domain, r.codomain), relation_to_pair_mask(r))


def pair_mask_to_relation(h: Filter, gx: GroundSet | None = None,
                          gy: GroundSet | None = None) -> Relation:
    """Kernel graph of a filter on a product ground, as a Relation.

    When the factor grounds are not supplied they are recovered from the
    product ground's pair names.
    """
    if gx is None or gy is None:
        gx, gy = _split_product_ground(h.ground)
    ny = gy.size
    rows = tuple((h.kernel >> (ix * ny)) & gy.full_mask for ix in range(gx.size))
    return Relation(gx, gy, rows)


def _split_product_ground(g: GroundSet) -> tuple[GroundSet, GroundSet]:
    xs: list[str] = []
    ys: list[str] = []
    for name in g.elements:
        if not (name.startswith("(") and name.endswith(")") and "," in name):
            raise ValueError(f"{name!r} is not a product-ground point name")
        x, y = name[1:-1].split(",", 1)
        if x not in xs:
            xs.append(x)
        if y not in ys:
            ys.append(y)
    gx, gy = GroundSet(tuple(xs)), GroundSet(tuple(ys))
    if product_ground(gx, gy) != g:
        raise ValueError("ground set is not a product ground")
    return gx, gy


def product_filter(f: Filter, g: Filter) -> Filter:
    """F x G on the product ground; kernel is the box kernel(F) x kernel(G)."""
    pg = product_ground(f.ground, g.ground)
    mask = 0
    kx, ny = f.kernel, g.ground.size
    while kx:
        ix = (kx & -kx).bit_length() - 1
        mask |= g.kernel << (ix * ny)
        kx &= kx - 1
    return Filter(pg, mask)


def all_filters(g: GroundSet) -> list[Filter]:
    """Every filter on g, ascending by kernel mask (degenerate first)."""
    return [Filter(g, k) for k in g.all_masks()]


def all_relations(gx: GroundSet, gy: GroundSet) -> Iterator[Relation]:
    """Every relation gx -> gy, in deterministic row-tuple order."""
    ny_full = gy.full_mask
    def rec(rows: tuple[int, ...]) -> Iterator[Relation]:
        if len(rows) == gx.size:
            yield Relation(gx, gy, rows)
            return
        for r in range(ny_full + 1):
            yield from rec(rows + (r,))
    yield from rec(())


def all_subsets_of_size(g: GroundSet, k: int) -> Iterator[int]:
    for combo in combinations(range(g.size), k):
        yield sum(1 << i for i in combo)
