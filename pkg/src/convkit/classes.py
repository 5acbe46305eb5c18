"""Space-parameterized filter classes, the class reflector/coreflector,
accessibility, and the meshable-refinable predicate.

On a finite ground every filter is principal, so the classes "principal",
"countably based", "countably deep", "sequential" and "all" coincide; the
registry keeps separate tags with an explicit collapse marker instead of
silently identifying them.  The one genuinely distinct class at finite
scale is the principal filters of closed sets, which is why verification
suites always include that pair.

Class membership convention: every class contains the degenerate filter.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

from .family import Filter, GroundSet, all_filters, product_ground
from .spaces import AnySpace, FiniteSpace, RawSpace, expand, letters_ground


class InternalCheckError(RuntimeError):
    """Two provably equivalent computations disagreed (an implementation bug)."""


@dataclass(frozen=True)
class FilterClass:
    """A named, space-parameterized class of filters.

    kind:
      "all"  - every filter on the ground (the finite-scale form of the
               principal / countably based / countably deep / sequential /
               all-filters classes)
      "clF1" - principal filters of closed sets of the space
      "mr"   - filters that are meshable-refinable for a pair of classes
      "int"  - contours of multifilters whose cascades carry filters of a
               base class (node bound fixed at construction)
    """

    tag: str
    kind: str
    collapses: bool = False
    sub: tuple["FilterClass", ...] = ()
    max_nodes: int = 7

    def member_kernels(self, sp: AnySpace) -> tuple[int, ...]:
        return _member_kernels_cached(self, sp)

    def members(self, sp: AnySpace) -> list[Filter]:
        return [Filter(sp.ground, k) for k in self.member_kernels(sp)]

    def contains(self, sp: AnySpace, f: Filter) -> bool:
        return f.kernel in set(self.member_kernels(sp))

    def ground_kernels(self, g: GroundSet) -> tuple[int, ...]:
        """Space-free reduct used on the abstract grounds inside cascades.

        Closedness has no meaning on a bare ground, so the "clF1" reduct is
        all principal filters; "mr"/"int" likewise reduce to everything.
        """
        return tuple(g.all_masks())

    def __repr__(self) -> str:
        return self.tag


_MEMBER_CACHE: dict[tuple[FilterClass, AnySpace], tuple[int, ...]] = {}


def _member_kernels_cached(klass: FilterClass, sp: AnySpace) -> tuple[int, ...]:
    key = (klass, sp)
    got = _MEMBER_CACHE.get(key)
    if got is None:
        got = _compute_members(klass, sp)
        _MEMBER_CACHE[key] = got
    return got


def _compute_members(klass: FilterClass, sp: AnySpace) -> tuple[int, ...]:
    if klass.kind == "all":
        return tuple(sp.ground.all_masks())
    if klass.kind == "clF1":
        return tuple(sp.closed_sets())
    if klass.kind == "mr":
        j, d = klass.sub
        return tuple(k for k in sp.ground.all_masks()
                     if is_mesh_refinable(Filter(sp.ground, k), j, d, sp))
    if klass.kind == "int":
        from .cascades import enumerate_contour_kernels
        (d,) = klass.sub
        return enumerate_contour_kernels(sp.ground, d.ground_kernels, klass.max_nodes)
    raise ValueError(f"unknown class kind {klass.kind!r}")


F1 = FilterClass("F1", "all")
FOMEGA = FilterClass("Fw", "all", collapses=True)
FALL = FilterClass("F", "all", collapses=True)
FWEDGE_OMEGA = FilterClass("Fdw", "all", collapses=True)
SEQ = FilterClass("E", "all", collapses=True)
CLF1 = FilterClass("clF1", "clF1")


def mesh_refine(j: FilterClass, d: FilterClass) -> FilterClass:
    return FilterClass(f"mr({j.tag},{d.tag})", "mr", collapses=True, sub=(j, d))


def contour_class(d: FilterClass, max_nodes: int = 7) -> FilterClass:
    return FilterClass(f"int({d.tag})", "int", sub=(d,), max_nodes=max_nodes)


_BASE_TAGS = {"F1": F1, "Fw": FOMEGA, "F": FALL, "Fdw": FWEDGE_OMEGA,
              "E": SEQ, "clF1": CLF1}


def class_by_tag(tag: str) -> FilterClass:
    """Resolve a CLI class tag: F1, Fw, F, Fdw, clF1, E, int(D), mr(J,D)."""
    tag = tag.strip()
    if tag in _BASE_TAGS:
        return _BASE_TAGS[tag]
    if tag.startswith("int(") and tag.endswith(")"):
        return contour_class(class_by_tag(tag[4:-1]))
    if tag.startswith("mr(") and tag.endswith(")"):
        inner = tag[3:-1]
        depth, cut = 0, -1
        for i, ch in enumerate(inner):
            depth += ch == "("
            depth -= ch == ")"
            if ch == "," and depth == 0:
                cut = i
                break
        if cut < 0:
            raise ValueError(f"malformed class tag {tag!r}")
        return mesh_refine(class_by_tag(inner[:cut]), class_by_tag(inner[cut + 1:]))
    raise ValueError(f"unknown class tag {tag!r}")


def class_members(klass: FilterClass, sp: AnySpace) -> list[Filter]:
    return klass.members(sp)


# --- reflector and coreflector -------------------------------------------------


def adh_reflector_kernels(sp: AnySpace, kernels: tuple[int, ...]) -> FiniteSpace:
    """Point-limit map x -> intersection of adh(D) over class members meshing
    {x}^up; the full set when nothing meshes (empty-intersection convention)."""
    g = sp.ground
    full = g.full_mask
    adhs = {k: sp.adh_mask(k) for k in kernels}
    pl = []
    for i in range(g.size):
        x = 1 << i
        out = full
        for k in kernels:
            if k & x:
                out &= adhs[k]
        pl.append(out)
    return FiniteSpace(g, tuple(pl))


def adh_reflector(sp: AnySpace, klass: FilterClass) -> FiniteSpace:
    """Class reflector.  Coarsens the space; centered whenever the input is."""
    out = adh_reflector_kernels(sp, klass.member_kernels(sp))
    if isinstance(sp, FiniteSpace) and sp.is_centered() and not out.is_centered():
        raise InternalCheckError("reflector broke centeredness")
    return out


def base_coreflector_kernels(sp: AnySpace, kernels: tuple[int, ...]) -> RawSpace:
    """lim' F = union of lim(D) over class members D coarser than F.

    The result refines the space but need not be centered or
    point-determined when the class misses some point filters (e.g. the
    closed-set class), hence the full-table representation.
    """
    g = sp.ground
    table = []
    for k in g.all_masks():
        out = 0
        for kd in kernels:
            if k & ~kd == 0:
                out |= sp.lim_mask(kd)
        table.append(out)
    return RawSpace(g, tuple(table))


def base_coreflector(sp: AnySpace, klass: FilterClass) -> RawSpace:
    return base_coreflector_kernels(sp, klass.member_kernels(sp))


# --- accessibility and meshable-refinable --------------------------------------


def is_mesh_refinable(f: Filter, j: FilterClass, d: FilterClass,
                      sp: AnySpace) -> bool:
    """Every meshing J-filter admits a D-filter meshing it and finer than f."""
    d_kernels = d.member_kernels(sp)
    for kj in j.member_kernels(sp):
        if kj & f.kernel == 0:
            continue
        if not any(kd & kj and kd & ~f.kernel == 0 for kd in d_kernels):
            return False
    return True


def is_accessible(sp: FiniteSpace, j: FilterClass, d: FilterClass) -> bool:
    """adh J <= adh-in-the-D-based-coreflection J, for every J-filter.

    Also computed through the equivalent reflector inequality
    (space >= Adh_J Base_D space, classes evaluated on the space itself);
    a mismatch means an implementation bug and raises.
    """
    base = base_coreflector(sp, d)
    j_kernels = j.member_kernels(sp)
    definitional = all(sp.adh_mask(kj) & ~base.adh_mask(kj) == 0
                      for kj in j_kernels if kj)
    reflected = adh_reflector_kernels(base, j_kernels)
    via_reflector = all(sp.lim_mask(k) & ~reflected.lim_mask(k) == 0
                        for k in sp.ground.all_masks())
    if definitional != via_reflector:
        raise InternalCheckError(
            f"accessibility routes disagree on {sp!r} for ({j.tag}/{d.tag})")
    return definitional


# --- composability --------------------------------------------------------------


def _spaces_on(g: GroundSet) -> list[FiniteSpace]:
    n = g.size
    choices = []
    for i in range(n):
        own = 1 << i
        rest = g.full_mask & ~own
        opts = []
        sub = rest
        while True:
            opts.append(own | sub)
            if sub == 0:
                break
            sub = (sub - 1) & rest
        choices.append(sorted(opts))
    return [FiniteSpace(g, pl) for pl in iproduct(*choices)]


def is_composable(j: FilterClass, d: FilterClass, max_points: int = 2) -> bool:
    """J is D-composable: composing a J-filter with a D-filter on the product
    stays in J, for all grounds up to the bound.

    Space-parameterized classes are evaluated on every pair of convergences
    (with the product convergence on the product ground).
    """
    from .family import pair_mask_to_relation
    from .spaces import product as space_product
    needs_spaces = j.kind != "all" or d.kind != "all"
    for nx in range(1, max_points + 1):
        for ny in range(1, max_points + 1):
            gx = letters_ground(nx)
            gy = GroundSet(tuple("pqrs"[:ny]))
            if needs_spaces:
                xi_list = _spaces_on(gx)
                tau_list = _spaces_on(gy)
            else:
                xi_list = [FiniteSpace(gx, tuple(1 << i for i in range(nx)))]
                tau_list = [FiniteSpace(gy, tuple(1 << i for i in range(ny)))]
            for xi in xi_list:
                for tau in tau_list:
                    prod = space_product(xi, tau)
                    j_x = set(j.member_kernels(xi))
                    j_y = set(j.member_kernels(tau))
                    for kh in d.member_kernels(prod):
                        h = Filter(prod.ground, kh)
                        rel = pair_mask_to_relation(h, gx, gy)
                        for kf in j_x:
                            if rel.image(kf) not in j_y:
                                return False
    return True


@dataclass(frozen=True)
class ClassProps:
    """Composability and adherence-stability facts about a class."""

    klass: FilterClass
    f1_composable: bool
    composable: bool

    @staticmethod
    def of(klass: FilterClass, max_points: int = 2) -> ClassProps:
        return ClassProps(klass,
                          f1_composable=is_composable(klass, F1, max_points),
                          composable=is_composable(klass, klass, max_points))


def adh_stable(klass: FilterClass, sp: AnySpace) -> bool:
    """adh-image of every class member generates a filter still in the class."""
    kernels = set(klass.member_kernels(sp))
    return all(sp.adh_mask(k) in kernels for k in kernels)


def relation_composability(rel, d_dom: tuple[int, ...], dom_sp: AnySpace,
                           d_cod: tuple[int, ...], cod_sp: AnySpace) -> bool:
    """Per-instance composability: images of codomain-class kernels under the
    inverse relation land in the domain class and vice versa.

    This is the exact closure property the relation-compactness proofs use;
    theorem suites gate on it instead of the global class-level property so
    that closed-set-class instances are not vacuously skipped.
    """
    dom = set(d_dom)
    cod = set(d_cod)
    return (all(rel.preimage(k) in dom for k in cod)
            and all(rel.image(k) in cod for k in dom))
