"""Finite cascades, multifilters and the contour operator.

A cascade here is a finite rooted tree whose interior nodes carry a filter
on the set of their immediate successors; a multifilter labels every
non-root node with a point of a ground set.  The contour is computed by
structural recursion: a leaf contributes its point filter, an interior node
contributes the contour of its node filter along its children's contours.
On finite grounds the whole recursion collapses to kernel arithmetic
(kernel of a contour along F = union of the child kernels selected by
kernel F), which the definitional oracle re-derives through family algebra.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Callable, Mapping

from .family import (Filter, GroundSet, Relation, pair_mask_to_relation,
                     rel_image)
from .spaces import letters_ground

MAX_CASCADE_NODES = 31


@dataclass(frozen=True)
class Cascade:
    """Rooted tree (node 0 is the estuary) with a filter kernel per interior node.

    ``kernels[v]`` is a mask over the ordered child tuple of v, or None when
    v is a maximal node (a leaf).  A childless node with kernel 0 is legal:
    it is an interior node carrying the degenerate filter on the empty
    ground, and its contour is degenerate.
    """

    children: tuple[tuple[int, ...], ...]
    kernels: tuple[int | None, ...]

    def __post_init__(self) -> None:
        n = len(self.children)
        if not 1 <= n <= MAX_CASCADE_NODES:
            raise ValueError(f"cascade must have 1..{MAX_CASCADE_NODES} nodes")
        if len(self.kernels) != n:
            raise ValueError("one kernel slot per node required")
        seen = [False] * n
        seen[0] = True
        for v, kids in enumerate(self.children):
            if self.kernels[v] is None and kids:
                raise ValueError("leaf marker on a node with children")
            if self.kernels[v] is not None and self.kernels[v] >> len(kids):
                raise ValueError("node kernel uses bits beyond the child tuple")
            for c in kids:
                if not 0 < c < n or seen[c]:
                    raise ValueError("children must form a tree rooted at node 0")
                seen[c] = True
        if not all(seen):
            raise ValueError("unreachable nodes in cascade")

    def is_leaf(self, v: int) -> bool:
        return self.kernels[v] is None

    def rank(self, v: int = 0) -> int:
        if self.is_leaf(v) or not self.children[v]:
            return 0
        return 1 + max(self.rank(c) for c in self.children[v])

    @property
    def size(self) -> int:
        return len(self.children)


@dataclass(frozen=True)
class Multifilter:
    """Cascade plus a labeling of every non-root node into a ground set."""

    cascade: Cascade
    ground: GroundSet
    labels: tuple[str | None, ...]

    def __post_init__(self) -> None:
        if len(self.labels) != self.cascade.size:
            raise ValueError("one label slot per node required")
        if self.labels[0] is not None:
            raise ValueError("the estuary carries no label")
        for v in range(1, self.cascade.size):
            if self.labels[v] is None:
                raise ValueError("labels must be total away from the estuary")
            self.ground.index(self.labels[v])

    def rank(self) -> int:
        return self.cascade.rank()

    def relabel_interior(self, new: Mapping[int, str]) -> Multifilter:
        """Replace labels of non-maximal nodes; the contour must not change."""
        labels = list(self.labels)
        for v, name in new.items():
            if v == 0 or self.cascade.is_leaf(v):
                raise ValueError("only interior non-root labels may be replaced")
            labels[v] = name
        return Multifilter(self.cascade, self.ground, tuple(labels))


@dataclass
class ContourResult:
    """Contour value plus the evaluation trace (node, kernel, child traces).

    Traces are for display; equality compares the filter only.
    """

    filter: Filter
    trace: tuple

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ContourResult):
            return self.filter == other.filter
        return NotImplemented


def contour_along(f: Filter, g: Mapping[str, Filter] | Callable[[str], Filter]) -> Filter:
    """Contour of the point-indexed family g along f:
    kernel = union of kernel(g(x)) over x in kernel(f)."""
    pick = g.__getitem__ if isinstance(g, Mapping) else g
    ground: GroundSet | None = None
    out = 0
    for x in f.ground.names_of(f.kernel):
        gx = pick(x)
        if ground is None:
            ground = gx.ground
        elif ground != gx.ground:
            raise ValueError("family members live on different grounds")
        out |= gx.kernel
    if ground is None:
        for x in f.ground.elements:
            ground = pick(x).ground
            break
        assert ground is not None
    return Filter(ground, out)


def contour(phi: Multifilter) -> ContourResult:
    casc, g = phi.cascade, phi.ground
    if casc.is_leaf(0):
        raise ValueError("a rank-0 cascade (bare estuary) has no contour")

    def eval_node(v: int) -> tuple[int, tuple]:
        if casc.is_leaf(v):
            k = 1 << g.index(phi.labels[v])
            return k, (v, k, ())
        out = 0
        subs = []
        for i, c in enumerate(casc.children[v]):
            ck, sub = eval_node(c)
            subs.append(sub)
            if casc.kernels[v] >> i & 1:
                out |= ck
        return out, (v, out, tuple(subs))

    kernel, trace = eval_node(0)
    return ContourResult(Filter(g, kernel), trace)


def rank(casc: Cascade) -> int:
    return casc.rank()


# --- the constructive composition transform ------------------------------------


def contour_compose(j: Filter | Relation, phi: Multifilter) -> Multifilter:
    """Transform a multifilter on X into one on Y whose contour equals the
    image of the original contour under a filter/relation on X x Y.

    Leaves expand into a node carrying the principal filter of the image of
    their label; interior structure is copied.  The defining equality is
    asserted on every call.
    """
    rel = j if isinstance(j, Relation) else pair_mask_to_relation(j)
    gy = rel.codomain
    children: list[tuple[int, ...]] = []
    kernels: list[int | None] = []
    labels: list[str | None] = []
    filler = gy.elements[0]

    def new_node(kids: tuple[int, ...], kern: int | None, label: str | None) -> int:
        children.append(kids)
        kernels.append(kern)
        labels.append(label)
        return len(children) - 1

    def build(v: int, label: str | None) -> int:
        casc = phi.cascade
        if casc.is_leaf(v):
            me = new_node((), None, label)  # placeholder, fixed below
            image = rel.rows[phi.ground.index(phi.labels[v])]
            kids = []
            for name in gy.names_of(image):
                kids.append(new_node((), None, name))
            children[me] = tuple(kids)
            kernels[me] = (1 << len(kids)) - 1
            return me
        me = new_node((), casc.kernels[v], label)
        kids = tuple(build(c, filler) for c in casc.children[v])
        children[me] = kids
        return me

    build(0, None)
    out = Multifilter(Cascade(tuple(children), tuple(kernels)), gy, tuple(labels))
    expect = rel_image(rel, contour(phi).filter)
    got = contour(out).filter
    if got != expect:
        raise AssertionError("composition transform produced a wrong contour")
    return out


# --- enumeration of contour classes ---------------------------------------------


def enumerate_contour_kernels(g: GroundSet,
                              interior_fn: Callable[[GroundSet], tuple[int, ...]],
                              max_nodes: int = 7) -> tuple[int, ...]:
    """Kernels of contours of all multifilters within the node budget whose
    interior filters are drawn from ``interior_fn`` per child ground.

    Children realizing the same contour kernel are interchangeable, so it
    suffices to keep one cheapest realization per kernel; that makes the
    fixpoint exact and small.
    """
    best: dict[int, int] = {1 << i: 1 for i in range(g.size)}
    results: set[int] = set()
    changed = True
    while changed:
        changed = False
        units = sorted(best.items())
        for arity in range(1, max_nodes):
            ag = letters_ground(arity)
            root_kernels = interior_fn(ag)
            for combo in combinations_with_replacement(units, arity):
                cost = 1 + sum(c for _, c in combo)
                if cost > max_nodes:
                    continue
                child_k = [k for k, _ in combo]
                for rk in root_kernels:
                    kern = 0
                    for i in range(arity):
                        if rk >> i & 1:
                            kern |= child_k[i]
                    results.add(kern)
                    if best.get(kern, max_nodes + 1) > cost:
                        best[kern] = cost
                        changed = True
    return tuple(sorted(results))


# --- convenience builders --------------------------------------------------------


def rank_one(g: GroundSet, labels: tuple[str, ...], kernel: int) -> Multifilter:
    """Root with len(labels) leaf children; kernel selects children."""
    n = len(labels)
    children = (tuple(range(1, n + 1)),) + ((),) * n
    kernels = (kernel,) + (None,) * n
    return Multifilter(Cascade(children, kernels), g, (None,) + labels)
