"""The input-output relation functor, parametric kernels, and conditionals.

The input-output relation of a stochastic kernel is its possibilistic
shadow: the multivalued kernel relating each input to the outputs it can
produce with positive probability.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .asrel import UnsupportedKind, ase_kernels
from .kernel import (
    FinMarkovError,
    FinObject,
    Kernel,
    Kind,
    ShapeMismatch,
    associator,
    compose,
    copy_kernel,
    deterministic_states,
    discard_kernel,
    identity,
    kernel_equal,
    left_unitor,
    marginalize,
    split_tensor_labels,
    tensor,
    tensor_object,
)


class ParamMismatch(FinMarkovError):
    """Parametric kernels over different parameter objects."""


class NotAConditional(FinMarkovError):
    """The candidate does not reconstruct the joint kernel."""


def io_relation(p: Kernel) -> Kernel:
    """Multi kernel relating each input to its positive-probability
    outputs; objects are carried over unchanged.

    In this model the deterministic states of an object are exactly its
    elements, which is asserted by enumeration.
    """
    if p.kind is not Kind.STOCH:
        raise UnsupportedKind("the input-output relation is taken of stochastic kernels")
    assert len(deterministic_states(p.dom)) == p.dom.size
    rows = tuple(tuple(v > 0 for v in row) for row in p.matrix)
    out = Kernel(Kind.MULTI, p.dom, p.cod, rows)
    from .kernel import validate

    assert validate(out) is None  # point liftings make every image nonempty
    return out


# CLI-facing alias using the subcommand's name
upsilon = io_relation


@dataclass(frozen=True)
class RelationFunctorCheck:
    composition_ok: bool
    tensor_ok: bool
    copy_ok: bool


def upsilon_check(p: Kernel, g: Kernel) -> RelationFunctorCheck:
    """Functor laws of the relation on a composable pair p: A→X, g: X→Y:
    compatibility with composition, with the monoidal product, and with
    copying."""
    if p.cod != g.dom:
        raise ShapeMismatch("pair must compose as g∘p")
    composition_ok = kernel_equal(io_relation(compose(g, p)), compose(io_relation(g), io_relation(p)))
    tensor_ok = kernel_equal(io_relation(tensor(p, g)), tensor(io_relation(p), io_relation(g)))
    copy_ok = kernel_equal(io_relation(copy_kernel(p.dom)), copy_kernel(p.dom, Kind.MULTI))
    return RelationFunctorCheck(composition_ok, tensor_ok, copy_ok)


# ---------------------------------------------------------------------------
# Parametric kernels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParamMorphism:
    """A kernel A → X with an extra parameter wire W: the inner kernel
    has domain W⊗A."""

    w: FinObject
    a: FinObject
    x: FinObject
    inner: Kernel

    def __post_init__(self) -> None:
        if self.inner.dom != tensor_object(self.w, self.a):
            raise ShapeMismatch("inner domain must be the parameter tensor the input")
        if self.inner.cod != self.x:
            raise ShapeMismatch("inner codomain must be the declared output")


def param_lift(f: Kernel, w: FinObject) -> ParamMorphism:
    """Lift an ordinary kernel by discarding the parameter."""
    inner = compose(
        f, compose(left_unitor(f.dom, f.kind), tensor(discard_kernel(w, f.kind), identity(f.dom, f.kind)))
    )
    return ParamMorphism(w, f.dom, f.cod, inner)


def param_identity(w: FinObject, a: FinObject, kind: Kind = Kind.STOCH) -> ParamMorphism:
    return param_lift(identity(a, kind), w)


def param_copy(w: FinObject, a: FinObject, kind: Kind = Kind.STOCH) -> ParamMorphism:
    return param_lift(copy_kernel(a, kind), w)


def param_discard(w: FinObject, a: FinObject, kind: Kind = Kind.STOCH) -> ParamMorphism:
    return param_lift(discard_kernel(a, kind), w)


def param_compose(g: ParamMorphism, f: ParamMorphism) -> ParamMorphism:
    """Composition distributing the parameter with a copy:
    g∘f = g.inner ∘ (id_W ⊗ f.inner) ∘ (copy_W ⊗ id_A)."""
    if f.w != g.w:
        raise ParamMismatch("parameter objects differ")
    if f.x != g.a:
        raise ShapeMismatch("middle objects differ")
    kind = f.inner.kind
    w, a = f.w, f.a
    spread = compose(associator(w, w, a, kind), tensor(copy_kernel(w, kind), identity(a, kind)))
    inner = compose(g.inner, compose(tensor(identity(w, kind), f.inner), spread))
    return ParamMorphism(w, a, g.x, inner)


def param_tensor(f: ParamMorphism, g: ParamMorphism) -> ParamMorphism:
    """Monoidal product distributing the parameter with a copy."""
    if f.w != g.w:
        raise ParamMismatch("parameter objects differ")
    kind = f.inner.kind
    w = f.w
    a, b = f.a, g.a
    ab = tensor_object(a, b)
    # W⊗(A⊗B) → (W⊗A)⊗(W⊗B), deterministic: (w,(a,b)) ↦ ((w,a),(w,b))
    src = tensor_object(w, ab)
    dst = tensor_object(tensor_object(w, a), tensor_object(w, b))
    one = True if kind is Kind.MULTI else Fraction(1)
    zero = False if kind is Kind.MULTI else Fraction(0)
    na, nb, nw = a.size, b.size, w.size
    rows = []
    for wi1 in range(nw):
        for ai in range(na):
            for wi2 in range(nw):
                for bi in range(nb):
                    row = [zero] * src.size
                    if wi1 == wi2:
                        row[wi1 * (na * nb) + ai * nb + bi] = one
                    rows.append(tuple(row))
    distribute = Kernel(kind, src, dst, tuple(rows))
    inner = compose(tensor(f.inner, g.inner), distribute)
    return ParamMorphism(w, ab, tensor_object(f.x, g.x), inner)


def param_equal(f: ParamMorphism, g: ParamMorphism) -> bool:
    return f.w == g.w and f.a == g.a and f.x == g.x and kernel_equal(f.inner, g.inner)


# ---------------------------------------------------------------------------
# Conditionals
# ---------------------------------------------------------------------------


def conditional(f: Kernel, split: int) -> Kernel:
    """Conditional of a joint kernel f: A → X⊗Y given its first factor.

    Returns c: X⊗A → Y with c(y|x,a) = f((x,y)|a) / Σ_y' f((x,y')|a);
    where the marginal mass vanishes the column is the point mass on the
    first element of Y.  The reconstruction identity is verified exactly
    before returning.
    """
    if f.kind is not Kind.STOCH:
        raise UnsupportedKind("conditionals are implemented for stochastic kernels")
    x_obj, y_obj = split_tensor_labels(f.cod, split)
    na, nx, ny = f.dom.size, x_obj.size, y_obj.size
    dom = tensor_object(x_obj, f.dom)
    cols = []
    for x in range(nx):
        for a in range(na):
            mass = sum((f.matrix[x * ny + y][a] for y in range(ny)), Fraction(0))
            if mass > 0:
                cols.append([f.matrix[x * ny + y][a] / mass for y in range(ny)])
            else:
                cols.append([Fraction(1) if y == 0 else Fraction(0) for y in range(ny)])
    rows = tuple(tuple(cols[j][y] for j in range(nx * na)) for y in range(ny))
    cond = Kernel(Kind.STOCH, dom, y_obj, rows)
    if not kernel_equal(_reconstruct(f, cond, split), f):  # pragma: no cover
        raise NotAConditional("reconstruction of the joint failed")
    return cond


def _marginal_on_first(f: Kernel, split: int) -> Kernel:
    return marginalize(f, split, "right")


def _reconstruct(f: Kernel, cond: Kernel, split: int) -> Kernel:
    """Rebuild the joint from a conditional: the pairing
    (id_X ⊗ c)∘(copy_X ⊗ id_A)∘(f_X ⊗ id_A)∘copy_A."""
    x_obj, _ = split_tensor_labels(f.cod, split)
    kind = f.kind
    marg = _marginal_on_first(f, split)
    stage1 = compose(tensor(marg, identity(f.dom, kind)), copy_kernel(f.dom, kind))
    stage2 = compose(
        associator(x_obj, x_obj, f.dom, kind),
        compose(tensor(copy_kernel(x_obj, kind), identity(f.dom, kind)), stage1),
    )
    return compose(tensor(identity(x_obj, kind), cond), stage2)


def comparison_base(f: Kernel, split: int) -> Kernel:
    """The reference kernel for conditional uniqueness: pair the first
    marginal with the input, b = (f_X ⊗ id_A)∘copy_A : A → X⊗A."""
    marg = _marginal_on_first(f, split)
    return compose(tensor(marg, identity(f.dom, f.kind)), copy_kernel(f.dom, f.kind))


def verify_conditional_unique(f: Kernel, c1: Kernel, c2: Kernel, split: int | None = None) -> bool:
    """Check that two conditionals of the same joint agree almost surely
    w.r.t. the paired marginal; candidates that fail to reconstruct the
    joint are rejected.  The split is inferred from the candidates'
    domain when not given."""
    if split is None:
        if f.dom.size == 0 or c1.dom.size % f.dom.size != 0:
            raise ShapeMismatch("cannot infer the split from the candidate's domain")
        split = c1.dom.size // f.dom.size
    if c1.dom != c2.dom or c1.cod != c2.cod:
        raise ShapeMismatch("candidates must be parallel")
    for c in (c1, c2):
        if not kernel_equal(_reconstruct(f, c, split), f):
            raise NotAConditional("candidate does not satisfy the conditional equation")
    return ase_kernels(comparison_base(f, split), c1, c2)
