"""Supports, split supports, the equalizer principle, point liftings,
precise supports, and the free support completion.

The support of a kernel is the subset of codomain elements it can reach,
packaged with its deterministic inclusion and the factorization of the
kernel through it.  A split support additionally carries a projection
that retracts the inclusion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .asrel import abs_cont, ase_kernels, refute_abs_cont
from .kernel import (
    FinMarkovError,
    FinObject,
    Kernel,
    Kind,
    ShapeMismatch,
    compose,
    copy_kernel,
    identity,
    inclusion_kernel,
    is_deterministic,
    kernel_equal,
    subset_object,
    support_indices,
    tensor,
    tensor_object,
)


class EmptySupport(FinMarkovError):
    """A split support needs at least one reachable element."""


class NotAbsolutelyContinuous(FinMarkovError):
    """Factorization refused; carries the first refuting element."""

    def __init__(self, element: str):
        super().__init__(f"not absolutely continuous: mass at {element!r} off the support")
        self.element = element


class NotCommutative(FinMarkovError):
    """The given square does not commute, so no induced support map exists."""


class FactorizationFailed(FinMarkovError):
    """Internal assertion: a factorization the theory guarantees failed."""


class NotAse(FinMarkovError):
    """The morphisms are not almost surely equal, so no equalizer factorization."""


class NotDeterministic(FinMarkovError):
    """A deterministic kernel was required."""


class NotInSupport(FinMarkovError):
    """The element carries no mass under the kernel."""


class NotMember(FinMarkovError):
    """The kernel does not define a morphism of the support completion."""

    def __init__(self, element: str):
        super().__init__(f"pushforward puts mass at {element!r} outside the target anchor")
        self.element = element


class CellMismatch(FinMarkovError):
    """Completion cells do not line up for the requested operation."""


@dataclass(frozen=True)
class SupportData:
    """Support of ``base``: subset object, inclusion, factorization, and
    (for split supports) a projection retracting the inclusion."""

    base: Kernel
    supp_object: FinObject
    inclusion: Kernel
    factorization: Kernel
    projection: Optional[Kernel] = None

    def __post_init__(self) -> None:
        if not kernel_equal(compose(self.inclusion, self.factorization), self.base):
            raise FactorizationFailed("inclusion∘factorization must equal the base kernel")
        if not is_deterministic(self.inclusion):
            raise FactorizationFailed("support inclusion must be deterministic")
        cols = [self.inclusion.column(j) for j in range(self.supp_object.size)]
        if len(set(cols)) != len(cols):
            raise FactorizationFailed("support inclusion must be injective on columns")
        if self.projection is not None:
            retract = compose(self.projection, self.inclusion)
            if not kernel_equal(retract, identity(self.supp_object, self.base.kind)):
                raise FactorizationFailed("projection must retract the inclusion")


def _require_supportable(p: Kernel) -> None:
    if p.kind is Kind.SIGNED:
        from .asrel import UnsupportedKind

        raise UnsupportedKind("signed kernels have no supports in this library")


def support(p: Kernel) -> SupportData:
    """Support of p: reachable elements, subset inclusion, and the
    factorization obtained by deleting unreachable rows."""
    _require_supportable(p)
    idx = support_indices(p)
    inc = inclusion_kernel(p.cod, idx, p.kind)
    factor = Kernel(p.kind, p.dom, subset_object(p.cod, idx), tuple(p.matrix[i] for i in idx))
    return SupportData(p, inc.dom, inc, factor)


def factor_through_support(f: Kernel, sd: SupportData) -> Kernel:
    """The unique kernel through the support inclusion with ι∘f̂ = f.

    Exists exactly when the support's base dominates f; otherwise raises
    with the first refuting element.
    """
    if f.cod != sd.base.cod:
        raise ShapeMismatch("kernel does not land in the supported object")
    if not abs_cont(sd.base, f):
        witness = refute_abs_cont(sd.base, f)
        assert witness is not None
        raise NotAbsolutelyContinuous(witness.element)
    idx = [sd.base.cod.index(lbl) for lbl in sd.supp_object.labels]
    result = Kernel(f.kind, f.dom, sd.supp_object, tuple(f.matrix[i] for i in idx))
    assert kernel_equal(compose(sd.inclusion, result), f)
    return result


def split_support(p: Kernel) -> SupportData:
    """Support with a projection: support elements map to themselves and
    every unreachable element maps to the first support element."""
    _require_supportable(p)
    base = support(p)
    idx = [p.cod.index(lbl) for lbl in base.supp_object.labels]
    if not idx:
        raise EmptySupport("cannot project onto an empty support")
    kind = p.kind
    one = True if kind is Kind.MULTI else Fraction(1)
    zero = False if kind is Kind.MULTI else Fraction(0)
    pos = {x: s for s, x in enumerate(idx)}
    rows = []
    for s in range(len(idx)):
        row = []
        for x in range(p.cod.size):
            target = pos.get(x, 0)
            row.append(one if target == s else zero)
        rows.append(tuple(row))
    proj = Kernel(kind, p.cod, base.supp_object, tuple(rows))
    sd = SupportData(p, base.supp_object, base.inclusion, base.factorization, proj)
    assert ase_kernels(p, compose(sd.inclusion, proj), identity(p.cod, kind))
    return sd


def support_functor_map(p: Kernel, q: Kernel, f: Kernel, g: Kernel) -> Kernel:
    """The induced map between supports for a commuting square g∘p = q∘f.

    Returns the unique kernel d with ι_q∘d = g∘ι_p.  Its existence is
    guaranteed in the implemented models; a failure raises
    FactorizationFailed and indicates a defect.
    """
    if not kernel_equal(compose(g, p), compose(q, f)):
        raise NotCommutative("g∘p must equal q∘f exactly")
    sp, sq = support(p), support(q)
    side = compose(g, sp.inclusion)
    try:
        dashed = factor_through_support(side, sq)
    except NotAbsolutelyContinuous as exc:  # pragma: no cover - theory forbids this
        raise FactorizationFailed(str(exc)) from exc
    if not kernel_equal(compose(sq.inclusion, dashed), side):  # pragma: no cover
        raise FactorizationFailed("induced support map does not close the square")
    return dashed


def equalizer_factor(p: Kernel, f: Kernel, g: Kernel) -> tuple[FinObject, Kernel, Kernel]:
    """Factor p through the equalizer of a deterministic parallel pair.

    The equalizer object keeps the elements where f and g agree; p
    factors through its inclusion exactly when f and g are p-almost
    surely equal, else NotAse is raised.
    """
    if f.dom != g.dom or f.cod != g.cod:
        raise ShapeMismatch("parallel pair required")
    if not (is_deterministic(f) and is_deterministic(g)):
        raise NotDeterministic("equalizer principle applies to deterministic pairs")
    if p.cod != f.dom:
        raise ShapeMismatch("kernel must land in the domain of the pair")
    idx = tuple(j for j in range(f.dom.size) if f.column(j) == g.column(j))
    eq = inclusion_kernel(f.dom, idx, p.kind)
    if not ase_kernels(p, f, g):
        raise NotAse("pair differs on the support of the kernel")
    rows = tuple(p.matrix[i] for i in idx)
    p_factored = Kernel(p.kind, p.dom, eq.dom, rows)
    assert kernel_equal(compose(eq, p_factored), p)
    return eq.dom, eq, p_factored


def point_lift(p: Kernel, x: str) -> str:
    """First input (label order) whose image reaches the element x."""
    _require_supportable(p)
    i = p.cod.index(x)
    for j in range(p.dom.size):
        v = p.matrix[i][j]
        if v if p.kind is Kind.MULTI else v > 0:
            return p.dom.labels[j]
    raise NotInSupport(f"{x!r} carries no mass under the kernel")


@dataclass(frozen=True)
class PreciseSupportCheck:
    joint_dominates: bool
    pointwise: bool

    @property
    def agree(self) -> bool:
        return self.joint_dominates == self.pointwise


def precise_supports_equiv(p: Kernel, f: Kernel, x: str, y: str) -> PreciseSupportCheck:
    """Compare the joint-support and pointwise readings of reachability.

    joint: (x,y) is in the support of the paired state (id⊗f)∘copy∘p;
    pointwise: x is reachable by p and y by the column of f at x.
    The two agree for every input in the implemented models.
    """
    if p.dom.size != 1:
        raise ShapeMismatch("the reference kernel must be a state")
    if f.dom != p.cod:
        raise ShapeMismatch("second kernel must consume the state's codomain")
    joint = compose(tensor(identity(p.cod, p.kind), f), compose(copy_kernel(p.cod, p.kind), p))
    xi, yi = p.cod.index(x), f.cod.index(y)
    v = joint.matrix[xi * f.cod.size + yi][0]
    joint_dominates = bool(v) if p.kind is Kind.MULTI else v > 0
    px = p.matrix[xi][0]
    fyx = f.matrix[yi][xi]
    if p.kind is Kind.MULTI:
        pointwise = bool(px) and bool(fyx)
    else:
        pointwise = px > 0 and fyx > 0
    return PreciseSupportCheck(joint_dominates, pointwise)


# ---------------------------------------------------------------------------
# Free support completion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SuppCompCell:
    """Object of the support completion: a carrier with an atomic anchor
    landing in it."""

    object: FinObject
    anchor: Kernel

    def __post_init__(self) -> None:
        if self.anchor.cod != self.object:
            raise ShapeMismatch("anchor must land in the cell's object")
        from .asrel import is_atomic

        if not is_atomic(self.anchor):
            raise ShapeMismatch("anchor must be atomic")


@dataclass(frozen=True)
class SuppCompMorphism:
    """Morphism class of the completion in canonical form.

    The representative's columns at elements unreachable by the source
    anchor are the point mass on the first codomain element, which makes
    class equality decidable by kernel equality.
    """

    src: SuppCompCell
    dst: SuppCompCell
    rep: Kernel


def canonical_rep(f: Kernel, reachable: set[int]) -> Kernel:
    """Replace columns at unreachable inputs with the point mass on the
    first codomain element."""
    one = True if f.kind is Kind.MULTI else Fraction(1)
    zero = False if f.kind is Kind.MULTI else Fraction(0)
    point = tuple(one if i == 0 else zero for i in range(f.cod.size))
    cols = [f.column(j) if j in reachable else point for j in range(f.dom.size)]
    rows = tuple(tuple(cols[j][i] for j in range(f.dom.size)) for i in range(f.cod.size))
    return Kernel(f.kind, f.dom, f.cod, rows)


def scomp_cell(obj: FinObject, anchor: Kernel) -> SuppCompCell:
    return SuppCompCell(obj, anchor)


def scomp_hom(src: SuppCompCell, dst: SuppCompCell, f: Kernel) -> SuppCompMorphism:
    """Class of f as a completion morphism src → dst.

    Membership requires the pushforward of the source anchor along f to
    be dominated by the target anchor.
    """
    if f.dom != src.object or f.cod != dst.object:
        raise ShapeMismatch("kernel does not connect the given cells")
    push = compose(f, src.anchor)
    if not abs_cont(dst.anchor, push):
        witness = refute_abs_cont(dst.anchor, push)
        assert witness is not None
        raise NotMember(witness.element)
    return SuppCompMorphism(src, dst, canonical_rep(f, set(support_indices(src.anchor))))


def scomp_identity(cell: SuppCompCell) -> SuppCompMorphism:
    return scomp_hom(cell, cell, identity(cell.object, cell.anchor.kind))


def scomp_compose(g: SuppCompMorphism, f: SuppCompMorphism) -> SuppCompMorphism:
    if f.dst != g.src:
        raise CellMismatch("inner cells differ")
    return scomp_hom(f.src, g.dst, compose(g.rep, f.rep))


def scomp_abs_cont(f: SuppCompMorphism, g: SuppCompMorphism) -> bool:
    """Domination of completion morphisms with a common target cell,
    decided on the pushforwards of the source anchors."""
    if f.dst != g.dst:
        raise CellMismatch("absolute continuity compares morphisms into the same cell")
    return abs_cont(compose(g.rep, g.src.anchor), compose(f.rep, f.src.anchor))


def scomp_support(f: SuppCompMorphism) -> tuple[SuppCompCell, SuppCompMorphism]:
    """Support of a completion morphism: the cell anchored by the
    pushforward, with the identity class as inclusion."""
    push = compose(f.rep, f.src.anchor)
    cell = SuppCompCell(f.dst.object, push)
    inclusion = scomp_hom(cell, f.dst, identity(f.dst.object, push.kind))
    assert scomp_abs_cont(inclusion, f) and scomp_abs_cont(f, inclusion)
    return cell, inclusion


def scomp_tensor_cell(a: SuppCompCell, b: SuppCompCell) -> SuppCompCell:
    return SuppCompCell(tensor_object(a.object, b.object), tensor(a.anchor, b.anchor))
