"""Finite convergence spaces and their limit calculus.

A convergence on a finite set is determined by where the point filters
{x}^up converge: the monotonicity, centeredness and finite-meet axioms force
lim(A^up) = intersection over x in A of lim({x}^up).  A ``FiniteSpace``
stores exactly that point-limit map.  The harness suite ``point-determined``
re-derives the collapse by enumerating raw kernel->limit tables.

Some derived structures (the class-based coreflection in
:mod:`convkit.classes`) do not stay point-determined or centered, so a
second representation, ``RawSpace``, keeps one limit set per kernel.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .family import (Filter, GroundSet, GroundMismatchError, Relation,
                     _check_same_ground, require_map)


class DivergenceError(RuntimeError):
    """A monotone fixpoint loop failed to stabilize within 2^n steps (a bug)."""


@dataclass(frozen=True)
class FiniteSpace:
    """Convergence structure stored as the point-limit map x -> lim {x}^up."""

    ground: GroundSet
    pointlim: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.pointlim) != self.ground.size:
            raise ValueError("one limit set per point required")
        for m in self.pointlim:
            if m & ~self.ground.full_mask:
                raise ValueError("limit mask outside ground set")

    def is_centered(self) -> bool:
        """x in lim {x}^up for every x.  All genuine convergences are centered;
        coreflection images may not be (see classes.base_coreflector)."""
        return all(m >> i & 1 for i, m in enumerate(self.pointlim))

    def lim_mask(self, kernel: int) -> int:
        out = self.ground.full_mask
        k = kernel
        while k:
            i = (k & -k).bit_length() - 1
            out &= self.pointlim[i]
            k &= k - 1
        return out

    def adh_mask(self, kernel: int) -> int:
        out = 0
        k = kernel
        while k:
            i = (k & -k).bit_length() - 1
            out |= self.pointlim[i]
            k &= k - 1
        return out

    def lim(self, f: Filter) -> int:
        """lim of a filter; the degenerate filter gets the full set
        (empty-intersection convention, reported distinctly by the CLI)."""
        _check_same_ground(self.ground, f.ground)
        return self.lim_mask(f.kernel)

    def adh_filter(self, f: Filter) -> int:
        """Adherence: union of limits of all meshing filters; closed form
        is the union of point limits over the kernel."""
        _check_same_ground(self.ground, f.ground)
        return self.adh_mask(f.kernel)

    def adh_set(self, mask: int) -> int:
        return self.adh_mask(mask)

    def is_closed(self, mask: int) -> bool:
        return self.adh_mask(mask) & ~mask == 0

    def closed_sets(self) -> list[int]:
        return [m for m in self.ground.all_masks() if self.is_closed(m)]

    def closure(self, mask: int) -> int:
        """Smallest closed superset: iterate one-step adherence to a fixpoint."""
        cur = mask
        for _ in range(self.ground.full_mask + 2):
            nxt = self.adh_mask(cur)
            if nxt == cur:
                return cur
            cur = nxt
        raise DivergenceError("adherence iteration failed to stabilize")

    def vicinity(self, i: int) -> int:
        """Kernel of V(x): the points whose point filter converges to x."""
        x = 1 << i
        return sum(1 << j for j, m in enumerate(self.pointlim) if m & x)

    def vicinity_filter(self, name: str) -> Filter:
        return Filter(self.ground, self.vicinity(self.ground.index(name)))

    def vicinity_of_filter(self, f: Filter) -> Filter:
        """V(F) = union over F in F of the meet of V(x), x in F; its kernel is
        the union of vicinity kernels over the kernel of F."""
        _check_same_ground(self.ground, f.ground)
        out = 0
        k = f.kernel
        while k:
            i = (k & -k).bit_length() - 1
            out |= self.vicinity(i)
            k &= k - 1
        return Filter(self.ground, out)

    def nbhd(self, i: int) -> int:
        """Kernel of the neighborhood filter of x in the topological
        modification: the smallest open set containing x."""
        opens = [self.ground.full_mask & ~c for c in self.closed_sets()]
        out = self.ground.full_mask
        for o in opens:
            if o >> i & 1:
                out &= o
        return out

    def nbhd_filter(self, name: str) -> Filter:
        return Filter(self.ground, self.nbhd(self.ground.index(name)))

    def is_topology(self) -> bool:
        """x in lim N(x) for every x."""
        return all(self.lim_mask(self.nbhd(i)) >> i & 1
                   for i in range(self.ground.size))

    def is_pretopology(self) -> bool:
        """x in lim V(x); automatically true for centered finite spaces."""
        return all(self.lim_mask(self.vicinity(i)) >> i & 1
                   for i in range(self.ground.size))

    def is_p_diagonal(self) -> bool:
        """lim F <= lim V(F) for every filter (all 2^n kernels)."""
        for k in self.ground.all_masks():
            vf = self.vicinity_of_filter(Filter(self.ground, k))
            if self.lim_mask(k) & ~self.lim_mask(vf.kernel):
                return False
        return True

    def topologize(self) -> FiniteSpace:
        """Topological modification: the convergence of the topology whose
        closed sets are this space's closed sets.

        Computed through neighborhood filters: y in lim_T {x}^up iff x lies
        in the smallest open set around y.  Equal to x -> closure({x}); the
        harness checks the two routes agree.
        """
        n = self.ground.size
        nb = [self.nbhd(i) for i in range(n)]
        pl = tuple(sum(1 << j for j in range(n) if nb[j] >> i & 1)
                   for i in range(n))
        return FiniteSpace(self.ground, pl)

    def finer_or_equal(self, other: FiniteSpace) -> bool:
        """self >= other: every limit of self is a limit of other."""
        _check_same_ground(self.ground, other.ground)
        return all(a & ~b == 0 for a, b in zip(self.pointlim, other.pointlim))

    def __repr__(self) -> str:
        parts = ",".join(
            f"{x}:{''.join(self.ground.names_of(m))}"
            for x, m in zip(self.ground.elements, self.pointlim))
        return f"Space({parts})"


def space(g: GroundSet, pointlim: dict[str, str]) -> FiniteSpace:
    """Build a space from name -> limit-point-string, e.g. {"a": "ab"}."""
    pl = tuple(g.mask_of(pointlim[x]) for x in g.elements)
    sp = FiniteSpace(g, pl)
    if not sp.is_centered():
        raise ValueError("centeredness violated: some x is not in lim {x}^up")
    return sp


@dataclass(frozen=True)
class RawSpace:
    """Limit structure given by a full kernel -> limit table (2^n entries).

    Used where point-determination is not guaranteed: coreflection images
    and the definitional oracles.
    """

    ground: GroundSet
    table: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.table) != self.ground.full_mask + 1:
            raise ValueError("limit table must cover every kernel")

    def lim_mask(self, kernel: int) -> int:
        return self.table[kernel]

    def adh_mask(self, mask: int) -> int:
        out = 0
        for k in range(1, self.ground.full_mask + 1):
            if k & mask:
                out |= self.table[k]
        return out

    def is_closed(self, mask: int) -> bool:
        return self.adh_mask(mask) & ~mask == 0

    def closed_sets(self) -> list[int]:
        return [m for m in self.ground.all_masks() if self.is_closed(m)]

    def is_point_determined(self) -> bool:
        sp = self.to_pointspace()
        return all(self.table[k] == sp.lim_mask(k)
                   for k in range(1, self.ground.full_mask + 1))

    def to_pointspace(self) -> FiniteSpace:
        pl = tuple(self.table[1 << i] for i in range(self.ground.size))
        return FiniteSpace(self.ground, pl)

    def finer_or_equal(self, other: FiniteSpace | RawSpace) -> bool:
        _check_same_ground(self.ground, other.ground)
        return all(self.table[k] & ~other.lim_mask(k) == 0
                   for k in self.ground.all_masks())


def expand(sp: FiniteSpace) -> RawSpace:
    return RawSpace(sp.ground, tuple(sp.lim_mask(k) for k in sp.ground.all_masks()))


AnySpace = FiniteSpace | RawSpace


@dataclass(frozen=True)
class SpaceKind:
    """Classification flags, recomputed on demand (never stored stale).

    Pretopology, paratopology and pseudotopology coincide with convergence
    at finite scale; the flags record that collapse explicitly.
    """

    is_topology: bool
    is_p_diagonal: bool
    is_pretopology: bool = True
    is_paratopology: bool = True
    is_pseudotopology: bool = True

    @staticmethod
    def of(sp: FiniteSpace) -> SpaceKind:
        return SpaceKind(sp.is_topology(), sp.is_p_diagonal())


# --- continuity, initial/final/product ----------------------------------------


def is_continuous(f: Relation, xi: FiniteSpace, tau: FiniteSpace) -> bool:
    """f(lim F) <= lim f(F) for all F; pointwise on point filters suffices
    for point-determined spaces (the general check is the oracle's job)."""
    require_map(f)
    _check_same_ground(f.domain, xi.ground)
    _check_same_ground(f.codomain, tau.ground)
    return all(f.image(xi.pointlim[i]) & ~tau.pointlim[f.apply(i)] == 0
               for i in range(xi.ground.size))


def initial(tau: FiniteSpace, f: Relation) -> FiniteSpace:
    """Coarsest convergence on the domain making f continuous:
    lim {x}^up = f^-( lim_tau {f(x)}^up )."""
    require_map(f)
    _check_same_ground(f.codomain, tau.ground)
    pl = tuple(f.preimage(tau.pointlim[f.apply(i)]) for i in range(f.domain.size))
    return FiniteSpace(f.domain, pl)


def final(xi: FiniteSpace, f: Relation) -> FiniteSpace:
    """Finest convergence on the codomain making f continuous:
    lim {y}^up = union of f(lim {x}^up) over the fiber of y.

    Requires a surjection (fibers must be nonempty to keep centeredness).
    """
    require_map(f)
    _check_same_ground(f.domain, xi.ground)
    if not f.is_surjective():
        raise ValueError("final convergence requires a surjective map")
    ny = f.codomain.size
    pl = [0] * ny
    for i in range(f.domain.size):
        pl[f.apply(i)] |= f.image(xi.pointlim[i])
    return FiniteSpace(f.codomain, tuple(pl))


def product(xi: FiniteSpace, tau: FiniteSpace) -> FiniteSpace:
    """Product convergence on the product ground: lim {(x,y)} = lim{x} x lim{y}."""
    from .family import product_ground
    pg = product_ground(xi.ground, tau.ground)
    ny = tau.ground.size
    pl = []
    for i in range(xi.ground.size):
        for j in range(ny):
            mask = 0
            lx = xi.pointlim[i]
            while lx:
                a = (lx & -lx).bit_length() - 1
                mask |= tau.pointlim[j] << (a * ny)
                lx &= lx - 1
            pl.append(mask)
    return FiniteSpace(pg, tuple(pl))


def final_adh_identity_check(xi: FiniteSpace, f: Relation) -> bool:
    """adh in the final structure = image of adh of the preimage, for every
    filter on the codomain.  Used by the quotient characterization."""
    fs = final(xi, f)
    for k in f.codomain.all_masks():
        lhs = fs.adh_mask(k)
        rhs = f.image(xi.adh_mask(f.preimage(k)))
        if lhs != rhs:
            return False
    return True


@lru_cache(maxsize=None)
def letters_ground(n: int) -> GroundSet:
    return GroundSet(tuple("abcdefghijklmnop"[:n]))
