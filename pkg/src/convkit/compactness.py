"""Compactness of filters and families: class-relative compactness at a
family, cover compactness, the two-class refinement variant, and the
pretopological-diagonality bridge.

At finite scale every subset is compact (adherence is extensive), so the
interesting content is relative: which filters are compact at which
families, for which classes, and how the cover and filter formulations
relate.  The suites that quantify these notions record vacuous passes
separately from witnessed ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .classes import FilterClass, adh_reflector, adh_stable
from .family import FamilyOfSets, Filter, minimize
from .spaces import AnySpace, FiniteSpace

VICINITY_CROSSCHECK = True


def _at_minimals(at: Filter | FamilyOfSets | int) -> tuple[int, ...]:
    if isinstance(at, FamilyOfSets):
        return at.minimals
    if isinstance(at, Filter):
        return (at.kernel,)
    return (at,)


def _subject_minimals(subject: Filter | FamilyOfSets) -> tuple[int, ...]:
    if isinstance(subject, Filter):
        return (subject.kernel,)
    return subject.minimals


def _meshes_mask(mask: int, minimals: tuple[int, ...]) -> bool:
    return all(mask & m for m in minimals)


def is_d_compact_at(subject: Filter | FamilyOfSets,
                    at: Filter | FamilyOfSets | int,
                    klass: FilterClass, sp: AnySpace,
                    kernels: Sequence[int] | None = None) -> bool:
    """Every class filter meshing the subject has adherence meshing ``at``.

    ``subject`` may be a general family, ``at`` may be a family, filter or a
    plain subset mask.  ``kernels`` overrides the class evaluation (used by
    suites that freeze a class at another space).
    """
    subj = _subject_minimals(subject)
    target = _at_minimals(at)
    if kernels is None:
        kernels = klass.member_kernels(sp)
    for kd in kernels:
        if _meshes_mask(kd, subj) and not _meshes_mask(sp.adh_mask(kd), target):
            return False
    return True


def is_dj_compact_at(subject: Filter | FamilyOfSets,
                     at: Filter | FamilyOfSets | int,
                     d: FilterClass, j: FilterClass, sp: AnySpace) -> bool:
    """Two-class refinement compactness: a class filter D is constrained only
    when every coarser J-filter has adherence meshing the subject.

    For J the principal class this reduces to meshing through one-step
    adherence images, which is cross-checked on every call against the
    vicinity-filter formulation while VICINITY_CROSSCHECK is on.
    """
    subj = _subject_minimals(subject)
    target = _at_minimals(at)
    j_kernels = j.member_kernels(sp)
    out = True
    for kd in d.member_kernels(sp):
        hypo = all(_meshes_mask(sp.adh_mask(kj), subj)
                   for kj in j_kernels if kd & ~kj == 0)
        if hypo and not _meshes_mask(sp.adh_mask(kd), target):
            out = False
            break
    if VICINITY_CROSSCHECK and j.kind == "all" and isinstance(subject, Filter) \
            and isinstance(sp, FiniteSpace):
        via_vicinity = is_d_compact_at(sp.vicinity_of_filter(subject), at, d, sp)
        if out != via_vicinity:
            raise AssertionError("vicinity-filter route disagrees with the "
                                 "two-class definition for the principal class")
    return out


# --- covers ---------------------------------------------------------------------


@dataclass(frozen=True)
class Cover:
    """A raw collection of sets proposed as a cover of a target subset.

    Deliberately not up-closed: containing an element of the collection is
    sensitive to which sets are literally present (up-closing would make the
    full set cover everything).
    """

    sp: FiniteSpace
    sets: tuple[int, ...]
    target: int


def is_cover(sp: FiniteSpace, sets: Iterable[int], target: int) -> bool:
    """Every filter converging to a point of the target contains an element
    of the collection (quantified over all kernels, degenerate included)."""
    collection = tuple(sets)
    for k in sp.ground.all_masks():
        if sp.lim_mask(k) & target:
            if not any(k & ~s == 0 for s in collection):
                return False
    return True


@dataclass(frozen=True)
class CoverCompactReport:
    cover_compact: bool
    via_filters: bool
    countable_flag_ignored: bool


def is_cover_compact(sp: FiniteSpace, target: int,
                     countable: bool = False) -> CoverCompactReport:
    """Cover compactness by quantifying additive covers, compared against the
    filter reformulation (every filter whose members all have adherent points
    in the target itself has adherent points there).

    The countable flag is interface parity only: countable covers are all
    covers at finite scale, and the report says so.
    """
    if sp.ground.size > 4:
        raise ValueError("cover-compactness enumeration is capped at 4 points")
    full = sp.ground.full_mask
    powerset = range(full + 1)
    by_covers = True
    for sel in range(1 << (full + 1)):
        sets = [m for m in powerset if sel >> m & 1]
        if not sets:
            continue
        pool = set(sets)
        union_closed = all((a | b) in pool for a in sets for b in sets)
        if not union_closed or not is_cover(sp, sets, target):
            continue
        if not any(is_cover(sp, (s,), target) for s in sets):
            by_covers = False
            break
    by_filters = True
    for h in range(1, full + 1):
        members_ok = all(sp.adh_mask(m) & target
                         for m in powerset if h & ~m == 0)
        if members_ok and not (sp.adh_mask(h) & target):
            by_filters = False
            break
    if by_covers != by_filters:
        raise AssertionError("cover and filter compactness routes disagree")
    return CoverCompactReport(by_covers, by_filters, countable)


# --- the diagonality bridge -------------------------------------------------------


@dataclass(frozen=True)
class BridgeOutcome:
    status: str  # holds | fails | not-applicable
    witness: str | None = None


@dataclass(frozen=True)
class BridgeReport:
    """Both directions of the bridge between plain and refined compactness."""

    adh_stable: bool
    p_diagonal: bool
    reflector_fixed: bool
    equivalence: BridgeOutcome
    converse: BridgeOutcome


def _all_at_masks(sp: AnySpace) -> range:
    return sp.ground.all_masks()


def pdiag_bridge(sp: FiniteSpace, d: FilterClass) -> BridgeReport:
    """Check, on one space and one class: (a) under diagonality and adherence
    stability the refined and plain compactness coincide, and (b) if the
    space is reflector-fixed and plain implies refined, the space is
    diagonal.  Hypothesis failures yield not-applicable, never a silent pass.
    """
    stable = adh_stable(d, sp)
    pdiag = sp.is_p_diagonal()
    fixed = adh_reflector(sp, d).pointlim == sp.pointlim

    from .classes import F1
    equal = True
    witness = None
    for kf in sp.ground.all_masks():
        f = Filter(sp.ground, kf)
        for b in _all_at_masks(sp):
            plain = is_d_compact_at(f, b, d, sp)
            refined = is_dj_compact_at(f, b, d, F1, sp)
            if refined and not plain:
                raise AssertionError("refined compactness must imply plain")
            if plain != refined:
                equal = False
                witness = f"F={f!r} at mask {b:#x}: plain={plain} refined={refined}"
                break
        if not equal:
            break

    if stable and pdiag:
        equivalence = BridgeOutcome("holds" if equal else "fails", witness)
    else:
        equivalence = BridgeOutcome("not-applicable",
                                    f"adh_stable={stable} p_diagonal={pdiag}")

    if fixed and equal:
        converse = BridgeOutcome("holds" if pdiag else "fails",
                                 None if pdiag else "space is not diagonal")
    else:
        converse = BridgeOutcome("not-applicable",
                                 f"reflector_fixed={fixed} implication={equal}")
    return BridgeReport(stable, pdiag, fixed, equivalence, converse)
