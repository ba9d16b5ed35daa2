"""Karoubi and Blackwell envelopes as computable categories.

A cell pairs an object with a designated idempotent endomorphism; a
morphism between cells is a kernel absorbed by both endomorphisms.  The
Blackwell flavor restricts to balanced idempotents, which guarantees
that the induced copy morphism is coassociative (non-balanced signed
idempotents can break it).
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass

from .asrel import ase_kernels
from .kernel import (
    FinMarkovError,
    FinObject,
    Kernel,
    ShapeMismatch,
    associator,
    compose,
    copy_kernel,
    discard_kernel,
    identity,
    kernel_equal,
    left_unitor,
    right_unitor,
    swap_kernel,
    tensor,
)
from .idempotents import NotEndo, NotIdempotent, classify
from .rand import random_kernel
from .supports import CellMismatch


class NotBalanced(FinMarkovError):
    """Blackwell cells require balanced idempotents."""


class NotHom(FinMarkovError):
    """The kernel is not absorbed by the endpoint idempotents."""


class Flavor(enum.Enum):
    KAROUBI = "karoubi"
    BLACKWELL = "blackwell"


@dataclass(frozen=True)
class EnvelopeCell:
    object: FinObject
    endo: Kernel
    flavor: Flavor


@dataclass(frozen=True)
class EnvelopeMorphism:
    src: EnvelopeCell
    dst: EnvelopeCell
    kernel: Kernel


def env_cell(x: FinObject, e: Kernel, flavor: Flavor) -> EnvelopeCell:
    """Validated cell: e must be idempotent, and balanced for Blackwell."""
    if e.dom != x or e.cod != x:
        raise NotEndo("cell endomorphism must live on the cell's object")
    report = classify(e)
    if not report.idempotent:
        raise NotIdempotent("cell endomorphism must be idempotent")
    if flavor is Flavor.BLACKWELL and not report.balanced:
        raise NotBalanced("Blackwell cells require a balanced idempotent")
    return EnvelopeCell(x, e, flavor)


def _unchecked_cell(x: FinObject, e: Kernel, flavor: Flavor) -> EnvelopeCell:
    """Test-only constructor that skips validation, used to exhibit what
    goes wrong on non-balanced idempotents."""
    return EnvelopeCell(x, e, flavor)


def env_identity(cell: EnvelopeCell) -> EnvelopeMorphism:
    """The identity of a cell is its designated idempotent."""
    return EnvelopeMorphism(cell, cell, cell.endo)


def env_hom(src: EnvelopeCell, dst: EnvelopeCell, f: Kernel) -> EnvelopeMorphism:
    """Check the two absorption equations f∘e_src = f = e_dst∘f."""
    if f.dom != src.object or f.cod != dst.object:
        raise ShapeMismatch("kernel does not connect the given cells")
    if not kernel_equal(compose(f, src.endo), f):
        raise NotHom("source idempotent is not absorbed (f∘e_src ≠ f)")
    if not kernel_equal(compose(dst.endo, f), f):
        raise NotHom("target idempotent is not absorbed (e_dst∘f ≠ f)")
    return EnvelopeMorphism(src, dst, f)


def env_compose(g: EnvelopeMorphism, f: EnvelopeMorphism) -> EnvelopeMorphism:
    if f.dst != g.src:
        raise CellMismatch("inner cells differ")
    out = EnvelopeMorphism(f.src, g.dst, compose(g.kernel, f.kernel))
    assert kernel_equal(compose(out.kernel, f.src.endo), out.kernel)
    assert kernel_equal(compose(g.dst.endo, out.kernel), out.kernel)
    return out


def cell_tensor(a: EnvelopeCell, b: EnvelopeCell) -> EnvelopeCell:
    """Tensor cell (X⊗Y, e_X⊗e_Y); balance is preserved, which the
    Blackwell flavor revalidates."""
    if a.flavor is not b.flavor:
        raise CellMismatch("cells of different flavors")
    ten = tensor(a.endo, b.endo)
    return env_cell(ten.dom, ten, a.flavor)


def env_tensor(f: EnvelopeMorphism, g: EnvelopeMorphism) -> EnvelopeMorphism:
    src = cell_tensor(f.src, g.src)
    dst = cell_tensor(f.dst, g.dst)
    out = EnvelopeMorphism(src, dst, tensor(f.kernel, g.kernel))
    assert kernel_equal(compose(out.kernel, src.endo), out.kernel)
    assert kernel_equal(compose(dst.endo, out.kernel), out.kernel)
    return out


def blackwell_copy(cell: EnvelopeCell) -> EnvelopeMorphism:
    """Copy morphism of a Blackwell cell: (e⊗e)∘copy∘e from the cell to
    its tensor square."""
    if cell.flavor is not Flavor.BLACKWELL:
        raise NotBalanced("the copy formula is defined on Blackwell cells")
    return _copy_formula(cell)


def _copy_formula(cell: EnvelopeCell) -> EnvelopeMorphism:
    e = cell.endo
    k = compose(tensor(e, e), compose(copy_kernel(e.dom, e.kind), e))
    dst = EnvelopeCell(k.cod, tensor(e, e), cell.flavor)
    out = EnvelopeMorphism(cell, dst, k)
    assert kernel_equal(compose(k, e), k)
    assert kernel_equal(compose(dst.endo, k), k)
    return out


def env_discard(cell: EnvelopeCell) -> EnvelopeMorphism:
    e = cell.endo
    k = compose(discard_kernel(e.dom, e.kind), e)
    dst = EnvelopeCell(k.cod, identity(k.cod, e.kind), cell.flavor)
    return EnvelopeMorphism(cell, dst, k)


@dataclass(frozen=True)
class MarkovLawReport:
    counit_left: bool
    counit_right: bool
    coassociative: bool
    cocommutative: bool
    discard_natural: bool

    @property
    def all_pass(self) -> bool:
        return (
            self.counit_left
            and self.counit_right
            and self.coassociative
            and self.cocommutative
            and self.discard_natural
        )


def env_check_markov_laws(cell: EnvelopeCell, seed: int = 0, endo_samples: int = 5) -> MarkovLawReport:
    """Check the comonoid laws of the cell's copy/discard pair.

    Valid Blackwell cells pass everything.  Cells built on non-balanced
    idempotents through the unchecked constructor can fail
    coassociativity (the other laws never depend on balance); discard
    naturality is sampled over random cell endomorphisms.
    """
    e = cell.endo
    kind = e.kind
    x = e.dom
    cpy = _copy_formula(cell).kernel
    disc = compose(discard_kernel(x, kind), e)

    left = compose(tensor(disc, e), cpy)
    right = compose(tensor(e, disc), cpy)
    cell_id = e
    counit_left = kernel_equal(compose(left_unitor(x, kind), left), cell_id)
    counit_right = kernel_equal(compose(right_unitor(x, kind), right), cell_id)

    lhs = compose(tensor(cpy, e), cpy)
    rhs = compose(tensor(e, cpy), cpy)
    coassociative = kernel_equal(compose(associator(x, x, x, kind), lhs), rhs)

    cocommutative = kernel_equal(compose(swap_kernel(x, x, kind), cpy), cpy)

    rng = random.Random(seed)
    discard_natural = True
    for _ in range(endo_samples):
        r = random_kernel(rng, kind, x, x)
        endo = compose(e, compose(r, e))
        if not kernel_equal(compose(disc, endo), disc):
            discard_natural = False
            break
    return MarkovLawReport(counit_left, counit_right, coassociative, cocommutative, discard_natural)


def env_ase(p: EnvelopeMorphism, f: EnvelopeMorphism, g: EnvelopeMorphism) -> bool:
    """Almost-sure equality computed inside the envelope (with the cell's
    copy morphism) and cross-checked against the underlying kernels."""
    if f.src != p.dst or g.src != p.dst or f.dst != g.dst:
        raise ShapeMismatch("morphisms do not form an almost-sure comparison")
    if p.dst.flavor is not Flavor.BLACKWELL:
        raise NotBalanced("almost-sure comparison needs a Blackwell middle cell")
    mid = p.dst
    cpy = _copy_formula(mid).kernel
    joint_f = compose(tensor(mid.endo, f.kernel), compose(cpy, p.kernel))
    joint_g = compose(tensor(mid.endo, g.kernel), compose(cpy, p.kernel))
    env_verdict = kernel_equal(joint_f, joint_g)
    base_verdict = ase_kernels(p.kernel, f.kernel, g.kernel)
    assert env_verdict == base_verdict
    return env_verdict


def env_split_idempotent(cell: EnvelopeCell) -> tuple[EnvelopeMorphism, EnvelopeMorphism]:
    """The formal splitting of a cell's idempotent inside the envelope.

    Viewing e as a morphism both (X,id) → (X,e) and (X,e) → (X,id), the
    two composites are the cell identity of (X,e) and the original
    idempotent on (X,id).
    """
    e = cell.endo
    plain = EnvelopeCell(cell.object, identity(e.dom, e.kind), cell.flavor)
    proj = env_hom(plain, cell, e)
    incl = env_hom(cell, plain, e)
    assert kernel_equal(env_compose(proj, incl).kernel, cell.endo)
    assert kernel_equal(env_compose(incl, proj).kernel, e)
    return proj, incl
