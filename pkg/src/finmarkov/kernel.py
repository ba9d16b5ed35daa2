"""Exact finite kernels over three scalar structures.

A kernel is a matrix whose column at a domain element gives the
distribution (Stoch), signed distribution (Signed) or set of possible
outputs (Multi) over the codomain.  All arithmetic is exact: Stoch and
Signed entries are `fractions.Fraction`, Multi entries are `bool`.
Floating point is rejected everywhere.

Matrix layout: ``matrix[i][j]`` is the weight of codomain element ``i``
given domain element ``j`` (rows indexed by the codomain, columns by the
domain), so a column reads off the image of one input.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

ZERO = Fraction(0)
ONE = Fraction(1)

Entry = Union[Fraction, bool]


class FinMarkovError(Exception):
    """Base class for all library errors."""


class ValidationError(FinMarkovError):
    """A kernel or object violates a structural law."""


class DomainMismatch(FinMarkovError):
    """Composition attempted along non-matching objects."""


class KindMismatch(FinMarkovError):
    """Operation mixing kernels of different kinds."""


class UnknownLabel(FinMarkovError):
    """A label does not belong to the given object."""


class BadSplit(FinMarkovError):
    """A codomain does not factor as a tensor at the requested position."""


class ShapeMismatch(FinMarkovError):
    """Kernel shapes do not fit the requested operation."""


class Kind(enum.Enum):
    STOCH = "stoch"
    SIGNED = "signed"
    MULTI = "multi"


class StructureKind(enum.Enum):
    COPY = "copy"
    DISCARD = "discard"
    SWAP = "swap"
    IDENTITY = "identity"
    DELTA = "delta"


@dataclass(frozen=True)
class FinObject:
    """An ordered finite set of distinct string labels.

    The listed order is the tie-breaking order used everywhere (first
    support element, witness scans, minimal class members).
    """

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError(f"duplicate labels in object: {self.labels}")

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(f"label {label!r} not in object {self.labels}") from None

    def __repr__(self) -> str:
        return f"FinObject({list(self.labels)!r})"


#: The monoidal unit: a single element written "•".
UNIT = FinObject(("•",))


def fin_object(labels: Iterable[str]) -> FinObject:
    return FinObject(tuple(labels))


def tensor_object(x: FinObject, y: FinObject) -> FinObject:
    """Product object with elements "(x,y)" in x-major order."""
    return FinObject(tuple(f"({a},{b})" for a in x.labels for b in y.labels))


def split_tensor_labels(obj: FinObject, left_size: int) -> tuple[FinObject, FinObject]:
    """Recover the two factors of a tensor-built object.

    Requires every label to have the form "(a,b)" consistently with an
    x-major ``left_size`` by ``obj.size // left_size`` grid.
    """
    n = obj.size
    if left_size <= 0 or n % left_size != 0:
        raise BadSplit(f"object of size {n} does not factor with left size {left_size}")
    right_size = n // left_size

    def unpair(label: str) -> tuple[str, str]:
        if not (label.startswith("(") and label.endswith(")")):
            raise BadSplit(f"label {label!r} is not a tensor pair")
        body = label[1:-1]
        depth = 0
        for k, ch in enumerate(body):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                return body[:k], body[k + 1 :]
        raise BadSplit(f"label {label!r} has no top-level comma")

    pairs = [unpair(lbl) for lbl in obj.labels]
    left = tuple(pairs[i * right_size][0] for i in range(left_size))
    right = tuple(pairs[j][1] for j in range(right_size))
    for i in range(left_size):
        for j in range(right_size):
            if pairs[i * right_size + j] != (left[i], right[j]):
                raise BadSplit(f"labels of {obj.labels} are not a consistent tensor grid")
    return FinObject(left), FinObject(right)


def _coerce_entry(kind: Kind, value) -> Entry:
    if kind is Kind.MULTI:
        if isinstance(value, bool):
            return value
        if isinstance(value, int):
            return bool(value)
        raise ValidationError(f"multi entries must be bool, got {value!r}")
    if isinstance(value, bool) or isinstance(value, float):
        raise ValidationError(f"exact kernels take Fraction or int entries, got {value!r}")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    raise ValidationError(f"bad matrix entry {value!r}")


@dataclass(frozen=True)
class Kernel:
    """A morphism: matrix over one of the three scalar structures.

    Construction performs shape checks only; use :func:`validate` or
    :func:`make_kernel` to enforce the column law of the kind.
    """

    kind: Kind
    dom: FinObject
    cod: FinObject
    matrix: tuple[tuple[Entry, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", tuple(tuple(row) for row in self.matrix))
        if len(self.matrix) != self.cod.size:
            raise ShapeMismatch(
                f"{len(self.matrix)} rows for codomain of size {self.cod.size}"
            )
        for row in self.matrix:
            if len(row) != self.dom.size:
                raise ShapeMismatch(
                    f"row of length {len(row)} for domain of size {self.dom.size}"
                )

    def entry(self, i: int, j: int) -> Entry:
        return self.matrix[i][j]

    def column(self, j: int) -> tuple[Entry, ...]:
        return tuple(row[j] for row in self.matrix)

    def at(self, out_label: str, in_label: str) -> Entry:
        return self.matrix[self.cod.index(out_label)][self.dom.index(in_label)]

    def __repr__(self) -> str:
        return (
            f"Kernel({self.kind.value}, dom={list(self.dom.labels)}, "
            f"cod={list(self.cod.labels)})"
        )


@dataclass(frozen=True)
class Violation:
    """First structural defect found by :func:`validate`."""

    column: Optional[int]
    message: str


def validate(k: Kernel) -> Optional[Violation]:
    """Check the column law of the kernel's kind; None means valid.

    Stoch: entries nonnegative, every column sums to 1.
    Signed: every column sums to 1.
    Multi: every column has at least one true entry.
    """
    for j in range(k.dom.size):
        col = k.column(j)
        if k.kind is Kind.MULTI:
            if not any(col):
                return Violation(j, f"column {j} has empty image")
            continue
        if k.kind is Kind.STOCH and any(v < 0 for v in col):
            bad = next(v for v in col if v < 0)
            return Violation(j, f"column {j} has negative entry {bad}")
        total = sum(col, ZERO)
        if total != ONE:
            return Violation(j, f"column {j} sums to {total}")
    return None


def make_kernel(kind: Kind, dom: FinObject, cod: FinObject, rows: Sequence[Sequence]) -> Kernel:
    """Build a kernel, coercing int entries, and enforce the column law."""
    matrix = tuple(tuple(_coerce_entry(kind, v) for v in row) for row in rows)
    k = Kernel(kind, dom, cod, matrix)
    bad = validate(k)
    if bad is not None:
        raise ValidationError(bad.message)
    return k


def multi_kernel(dom: FinObject, cod: FinObject, images: Sequence[Iterable[str]]) -> Kernel:
    """Multi kernel from per-input images given as label collections."""
    if len(images) != dom.size:
        raise ShapeMismatch(f"{len(images)} images for domain of size {dom.size}")
    idx = [{cod.index(lbl) for lbl in img} for img in images]
    rows = [[i in idx[j] for j in range(dom.size)] for i in range(cod.size)]
    return make_kernel(Kind.MULTI, dom, cod, rows)


def _zero(kind: Kind) -> Entry:
    return False if kind is Kind.MULTI else ZERO


def _one(kind: Kind) -> Entry:
    return True if kind is Kind.MULTI else ONE


def _add(kind: Kind, a: Entry, b: Entry) -> Entry:
    return (a or b) if kind is Kind.MULTI else a + b


def _mul(kind: Kind, a: Entry, b: Entry) -> Entry:
    return (a and b) if kind is Kind.MULTI else a * b


def _require_same_kind(f: Kernel, g: Kernel) -> None:
    if f.kind is not g.kind:
        raise KindMismatch(f"{f.kind.value} vs {g.kind.value}")


def compose(g: Kernel, f: Kernel) -> Kernel:
    """Sequential composite g∘f, with (g∘f)(z|a) = Σ_y g(z|y)·f(y|a).

    Over Multi the sum is boolean OR of ANDs (relational composition).
    Zero terms are skipped; sums of exact scalars are order-independent.
    """
    _require_same_kind(f, g)
    if f.cod != g.dom:
        raise DomainMismatch(
            f"cannot compose: middle objects differ ({f.cod.labels} vs {g.dom.labels})"
        )
    kind = f.kind
    multi = kind is Kind.MULTI
    n, m, p = g.cod.size, f.cod.size, f.dom.size
    zero = _zero(kind)
    out = [[zero] * p for _ in range(n)]
    gcols = [tuple(g.matrix[i][y] for i in range(n)) for y in range(m)]
    for j in range(p):
        for y in range(m):
            fv = f.matrix[y][j]
            if not fv:
                continue
            gcol = gcols[y]
            if multi:
                for i in range(n):
                    if gcol[i]:
                        out[i][j] = True
            else:
                for i in range(n):
                    gv = gcol[i]
                    if gv:
                        out[i][j] += gv * fv
    return Kernel(kind, f.dom, g.cod, tuple(tuple(row) for row in out))


def tensor(f: Kernel, g: Kernel) -> Kernel:
    """Monoidal product (f⊗g)((y,z)|(a,b)) = f(y|a)·g(z|b), x-major indexing."""
    _require_same_kind(f, g)
    kind = f.kind
    multi = kind is Kind.MULTI
    dom = tensor_object(f.dom, g.dom)
    cod = tensor_object(f.cod, g.cod)
    zero = _zero(kind)
    zero_row = (zero,) * dom.size
    nd2 = g.dom.size
    rows = []
    for i1 in range(f.cod.size):
        frow = f.matrix[i1]
        for i2 in range(g.cod.size):
            grow = g.matrix[i2]
            if not any(frow) or not any(grow):
                rows.append(zero_row)
                continue
            row = []
            for j1 in range(f.dom.size):
                fv = frow[j1]
                if not fv:
                    row.extend([zero] * nd2)
                elif multi:
                    row.extend(grow)
                else:
                    row.extend(fv * gv if gv else zero for gv in grow)
            rows.append(tuple(row))
    return Kernel(kind, dom, cod, tuple(rows))


def identity(x: FinObject, kind: Kind = Kind.STOCH) -> Kernel:
    rows = tuple(
        tuple(_one(kind) if i == j else _zero(kind) for j in range(x.size))
        for i in range(x.size)
    )
    return Kernel(kind, x, x, rows)


def copy_kernel(x: FinObject, kind: Kind = Kind.STOCH) -> Kernel:
    """copy(x₁,x₂|x) = [x₁ = x = x₂]; deterministic."""
    cod = tensor_object(x, x)
    n = x.size
    rows = []
    for i1 in range(n):
        for i2 in range(n):
            rows.append(
                tuple(
                    _one(kind) if i1 == j and i2 == j else _zero(kind)
                    for j in range(n)
                )
            )
    return Kernel(kind, x, cod, tuple(rows))


def discard_kernel(x: FinObject, kind: Kind = Kind.STOCH) -> Kernel:
    """The unique morphism to the unit: a single all-one row."""
    rows = (tuple(_one(kind) for _ in range(x.size)),)
    return Kernel(kind, x, UNIT, rows)


def swap_kernel(x: FinObject, y: FinObject, kind: Kind = Kind.STOCH) -> Kernel:
    """swap((y,x)|(x,y)) = 1."""
    dom = tensor_object(x, y)
    cod = tensor_object(y, x)
    rows = []
    for i2 in range(y.size):
        for i1 in range(x.size):
            rows.append(
                tuple(
                    _one(kind) if (j1 == i1 and j2 == i2) else _zero(kind)
                    for j1 in range(x.size)
                    for j2 in range(y.size)
                )
            )
    return Kernel(kind, dom, cod, tuple(rows))


def delta_kernel(x: FinObject, label: str, kind: Kind = Kind.STOCH) -> Kernel:
    """Point mass at ``label``, as a state I → X."""
    i0 = x.index(label)
    rows = tuple((_one(kind),) if i == i0 else (_zero(kind),) for i in range(x.size))
    return Kernel(kind, UNIT, x, rows)


def structure(
    which: StructureKind,
    x: FinObject,
    y: Optional[FinObject] = None,
    label: Optional[str] = None,
    kind: Kind = Kind.STOCH,
) -> Kernel:
    """Dispatching constructor for the structural morphisms."""
    if which is StructureKind.COPY:
        return copy_kernel(x, kind)
    if which is StructureKind.DISCARD:
        return discard_kernel(x, kind)
    if which is StructureKind.IDENTITY:
        return identity(x, kind)
    if which is StructureKind.SWAP:
        if y is None:
            raise ShapeMismatch("swap needs a second object")
        return swap_kernel(x, y, kind)
    if which is StructureKind.DELTA:
        if label is None:
            raise UnknownLabel("delta needs an element label")
        return delta_kernel(x, label, kind)
    raise ValueError(which)


def associator(x: FinObject, y: FinObject, z: FinObject, kind: Kind = Kind.STOCH) -> Kernel:
    """Relabeling iso (X⊗Y)⊗Z → X⊗(Y⊗Z); the underlying matrix is the identity."""
    dom = tensor_object(tensor_object(x, y), z)
    cod = tensor_object(x, tensor_object(y, z))
    return Kernel(kind, dom, cod, identity_matrix(dom.size, kind))


def left_unitor(x: FinObject, kind: Kind = Kind.STOCH) -> Kernel:
    """Relabeling iso I⊗X → X."""
    dom = tensor_object(UNIT, x)
    return Kernel(kind, dom, x, identity_matrix(x.size, kind))


def right_unitor(x: FinObject, kind: Kind = Kind.STOCH) -> Kernel:
    """Relabeling iso X⊗I → X."""
    dom = tensor_object(x, UNIT)
    return Kernel(kind, dom, x, identity_matrix(x.size, kind))


def right_unitor_inv(x: FinObject, kind: Kind = Kind.STOCH) -> Kernel:
    """Relabeling iso X → X⊗I."""
    cod = tensor_object(x, UNIT)
    return Kernel(kind, x, cod, identity_matrix(x.size, kind))


def identity_matrix(n: int, kind: Kind) -> tuple[tuple[Entry, ...], ...]:
    return tuple(
        tuple(_one(kind) if i == j else _zero(kind) for j in range(n)) for i in range(n)
    )


def marginalize(f: Kernel, split: int, side: str) -> Kernel:
    """Sum (OR) out one factor of a tensor-shaped codomain.

    ``split`` is the size of the left factor; ``side`` names the factor
    that gets discarded.  Equals post-composition with id⊗discard
    (side="right") or discard⊗id (side="left").
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    left, right = split_tensor_labels(f.cod, split)
    kind = f.kind
    m = right.size
    if side == "right":
        keep, block = left, True
    else:
        keep, block = right, False
    rows = []
    for i in range(keep.size):
        row = []
        for j in range(f.dom.size):
            acc = _zero(kind)
            if block:
                for r in range(m):
                    acc = _add(kind, acc, f.matrix[i * m + r][j])
            else:
                for l in range(left.size):
                    acc = _add(kind, acc, f.matrix[l * m + i][j])
            row.append(acc)
        rows.append(tuple(row))
    return Kernel(kind, f.dom, keep, tuple(rows))


def is_point_mass(kind: Kind, col: Sequence[Entry]) -> bool:
    if kind is Kind.MULTI:
        return sum(1 for v in col if v) == 1
    return sum(1 for v in col if v != 0) == 1 and any(v == 1 for v in col)


def is_deterministic(f: Kernel) -> bool:
    """True iff every column is a point mass.

    Shortcut for the comonoid equation copy∘f = (f⊗f)∘copy; the
    equivalence is property-tested against the literal equation.
    """
    return all(is_point_mass(f.kind, f.column(j)) for j in range(f.dom.size))


def deterministic_by_comonoid(f: Kernel) -> bool:
    """Literal comonoid-equation determinism test (reference oracle)."""
    lhs = compose(copy_kernel(f.cod, f.kind), f)
    rhs = compose(tensor(f, f), copy_kernel(f.dom, f.kind))
    return kernel_equal(lhs, rhs)


def kernel_equal(f: Kernel, g: Kernel) -> bool:
    """Exact equality: same kind, same dom/cod labels, identical matrices."""
    return (
        f.kind is g.kind
        and f.dom.labels == g.dom.labels
        and f.cod.labels == g.cod.labels
        and f.matrix == g.matrix
    )


def same_matrix(f: Kernel, g: Kernel) -> bool:
    """Matrix equality ignoring label decoration (for unitor/associator moves)."""
    return f.kind is g.kind and f.matrix == g.matrix


def support_indices(k: Kernel) -> tuple[int, ...]:
    """Indices of codomain elements hit with nonzero weight by some column.

    For Stoch this is the positive support; for Signed any nonzero entry
    counts; for Multi it is the union of images.
    """
    out = []
    for i in range(k.cod.size):
        row = k.matrix[i]
        if any(row) if k.kind is Kind.MULTI else any(v != 0 for v in row):
            out.append(i)
    return tuple(out)


def subset_object(x: FinObject, indices: Sequence[int]) -> FinObject:
    """Subset object keeping original labels and label order."""
    return FinObject(tuple(x.labels[i] for i in indices))


def inclusion_kernel(x: FinObject, indices: Sequence[int], kind: Kind) -> Kernel:
    """Deterministic inclusion of the subset at ``indices`` into ``x``."""
    sub = subset_object(x, indices)
    rows = tuple(
        tuple(_one(kind) if i == indices[j] else _zero(kind) for j in range(len(indices)))
        for i in range(x.size)
    )
    return Kernel(kind, sub, x, rows)


def deterministic_states(x: FinObject, kind: Kind = Kind.STOCH) -> list[Kernel]:
    """All point-mass states I → X, in label order."""
    return [delta_kernel(x, lbl, kind) for lbl in x.labels]


def deterministic_kernels(dom: FinObject, cod: FinObject, kind: Kind = Kind.STOCH) -> list[Kernel]:
    """All deterministic kernels dom → cod (|cod|^|dom| of them), lexicographic."""
    out = []
    for assignment in itertools.product(range(cod.size), repeat=dom.size):
        rows = tuple(
            tuple(_one(kind) if assignment[j] == i else _zero(kind) for j in range(dom.size))
            for i in range(cod.size)
        )
        out.append(Kernel(kind, dom, cod, rows))
    return out


def all_multi_kernels(dom: FinObject, cod: FinObject) -> list[Kernel]:
    """Every Multi kernel dom → cod, enumerated by column bitmasks."""
    n, m = cod.size, dom.size
    cols = list(range(1, 2**n))
    out = []
    for masks in itertools.product(cols, repeat=m):
        rows = tuple(
            tuple(bool(masks[j] >> i & 1) for j in range(m)) for i in range(n)
        )
        out.append(Kernel(Kind.MULTI, dom, cod, rows))
    return out
