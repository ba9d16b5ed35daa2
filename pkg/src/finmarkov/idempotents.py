"""Idempotent taxonomy, Blackwell splitting, exhaustive splitting search,
and the Cauchy-Schwarz implication checker.

An idempotent endomorphism e is classified by comparing the two-step
joint L((y,z)|x) = e(y|x)·e(z|y) (first output intermediate, second
final) against three reference shapes:

    static    L(y,z|x) = [y=z]·e(y|x)
    strong    L(y,z|x) = e(y|x)·e(z|x)
    balanced  L(y,z|x) = Σ_w e(y|w)·e(z|w)·e(w|x)

Witness tuples for failed checks are reported as (input, final,
intermediate) labels, scanned in that order.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

from .asrel import ase_kernels
from .kernel import (
    UNIT,
    FinMarkovError,
    FinObject,
    Kernel,
    Kind,
    ShapeMismatch,
    compose,
    copy_kernel,
    fin_object,
    identity,
    is_deterministic,
    kernel_equal,
    support_indices,
    swap_kernel,
    tensor,
)
from .rand import random_full_support_column, random_stoch_column


class NotEndo(FinMarkovError):
    """Endomorphism required."""


class NotIdempotent(FinMarkovError):
    """e∘e differs from e."""


class StructureViolation(FinMarkovError):
    """Internal invariant of the splitting construction failed; indicates
    the input was not a genuine idempotent (or a defect)."""


class NotASplitting(FinMarkovError):
    """The given pair does not split the idempotent."""


class SizeLimitExceeded(FinMarkovError):
    """Exhaustive search space larger than the configured bound."""


def _mul(kind: Kind, a, b):
    return (a and b) if kind is Kind.MULTI else a * b


def two_step(e: Kernel) -> Kernel:
    """Run the chain twice recording the intermediate value:
    result((y,z)|x) = e(y|x)·e(z|y), built from copy and tensor."""
    if e.dom != e.cod:
        raise NotEndo("two-step chain needs an endomorphism")
    return compose(compose(tensor(identity(e.dom, e.kind), e), copy_kernel(e.dom, e.kind)), e)


@dataclass(frozen=True)
class IdempotentReport:
    """Flags of the idempotent taxonomy plus witnesses for failures.

    ``witnesses`` maps a failed flag name to the label tuple of the first
    violated entry: (input, output) for idempotency, (input,) for
    determinism, (input, final, intermediate) for the two-step checks.
    All flags are False when the kernel is not idempotent.
    """

    idempotent: bool
    deterministic: bool
    static: bool
    strong: bool
    balanced: bool
    witnesses: Mapping[str, tuple]

    def flags(self) -> dict:
        return {
            "idempotent": self.idempotent,
            "deterministic": self.deterministic,
            "static": self.static,
            "strong": self.strong,
            "balanced": self.balanced,
        }


def _first_idempotency_violation(e: Kernel) -> Optional[tuple[str, str]]:
    ee = compose(e, e)
    for x in range(e.dom.size):
        for y in range(e.cod.size):
            if ee.matrix[y][x] != e.matrix[y][x]:
                return (e.dom.labels[x], e.cod.labels[y])
    return None


def classify(e: Kernel) -> IdempotentReport:
    """Classify an endomorphism; non-idempotents get all flags False.

    Results are memoized (kernels are immutable); the witness mapping is
    read-only.
    """
    if e.dom != e.cod:
        raise NotEndo("classification applies to endomorphisms")
    return _classify_cached(e)


@lru_cache(maxsize=4096)
def _classify_cached(e: Kernel) -> IdempotentReport:
    witnesses: dict = {}
    bad = _first_idempotency_violation(e)
    if bad is not None:
        return IdempotentReport(
            False, False, False, False, False, MappingProxyType({"idempotent": bad})
        )

    kind = e.kind
    n = e.dom.size
    labels = e.dom.labels
    multi = kind is Kind.MULTI
    zero = False if multi else Fraction(0)
    cols = [e.column(j) for j in range(n)]
    static = strong = balanced = True
    # scan order (input, final, intermediate); L(y,z|x) = e(y|x)·e(z|y)
    for x in range(n):
        col_x = cols[x]
        balanced_block = None
        if balanced:
            # block[y][z] = Σ_w e(y|w)·e(z|w)·e(w|x), skipping zero terms
            balanced_block = [[zero] * n for _ in range(n)]
            for w in range(n):
                cw = col_x[w]
                if not cw:
                    continue
                col_w = cols[w]
                for y in range(n):
                    a = col_w[y]
                    if not a:
                        continue
                    row = balanced_block[y]
                    if multi:
                        for z in range(n):
                            if col_w[z]:
                                row[z] = True
                    else:
                        acw = a * cw
                        for z in range(n):
                            b = col_w[z]
                            if b:
                                row[z] += acw * b
        for z in range(n):
            for y in range(n):
                ey = col_x[y]
                ezy = cols[y][z]
                lhs = (ey and ezy) if multi else ey * ezy
                if static:
                    want = ey if y == z else zero
                    if lhs != want:
                        static = False
                        witnesses.setdefault("static", (labels[x], labels[z], labels[y]))
                if strong:
                    ezx = col_x[z]
                    rhs = (ey and ezx) if multi else ey * ezx
                    if lhs != rhs:
                        strong = False
                        witnesses.setdefault("strong", (labels[x], labels[z], labels[y]))
                if balanced:
                    if lhs != balanced_block[y][z]:
                        balanced = False
                        witnesses.setdefault("balanced", (labels[x], labels[z], labels[y]))
        if not (static or strong or balanced):
            break
    deterministic = is_deterministic(e)
    if not deterministic:
        j = next(j for j in range(n) if not _point_mass(e, j))
        witnesses["deterministic"] = (labels[j],)
    report = IdempotentReport(
        True, deterministic, static, strong, balanced, MappingProxyType(witnesses)
    )
    assert (not static or balanced) and (not strong or balanced)
    assert not (static and strong) or deterministic
    return report


def _point_mass(e: Kernel, j: int) -> bool:
    col = e.column(j)
    if e.kind is Kind.MULTI:
        return sum(1 for v in col if v) == 1
    return sum(1 for v in col if v != 0) == 1 and any(v == 1 for v in col)


@dataclass(frozen=True)
class BalancedCrossCheck:
    """The four equivalent readings of being balanced, each computed
    independently; they agree on every idempotent."""

    defining: bool
    detailed_balance: bool
    strong_almost_surely: bool
    self_adjoint_on_columns: bool

    def all(self) -> tuple[bool, bool, bool, bool]:
        return (
            self.defining,
            self.detailed_balance,
            self.strong_almost_surely,
            self.self_adjoint_on_columns,
        )


def balanced_cross_check(e: Kernel) -> BalancedCrossCheck:
    """Evaluate the four characterizations of balance on an idempotent.

    (i) the defining two-step equation; (ii) detailed balance
    e(y|z)e(z|x) = e(z|y)e(y|x); (iii) the strong equation holding
    e-almost surely; (iv) symmetry of the paired state (id⊗e)∘copy∘p for
    every invariant column p of e (sufficient: the invariant kernels of an
    idempotent are spanned by its columns and the condition is linear).
    """
    if e.dom != e.cod:
        raise NotEndo("cross-check applies to endomorphisms")
    if _first_idempotency_violation(e) is not None:
        raise NotIdempotent("cross-check applies to idempotents")
    kind = e.kind
    n = e.dom.size

    defining = classify(e).balanced

    detailed = all(
        _mul(kind, e.matrix[y][z], e.matrix[z][x]) == _mul(kind, e.matrix[z][y], e.matrix[y][x])
        for x in range(n)
        for y in range(n)
        for z in range(n)
    )

    cop = copy_kernel(e.dom, kind)
    lhs = compose(compose(tensor(identity(e.dom, kind), e), cop), e)
    rhs = compose(tensor(e, e), cop)
    strong_as = ase_kernels(e, lhs, rhs)

    swap = swap_kernel(e.dom, e.dom, kind)
    self_adjoint = True
    paired = compose(tensor(identity(e.dom, kind), e), cop)
    for j in range(n):
        column_state = Kernel(kind, UNIT, e.dom, tuple((row[j],) for row in e.matrix))
        joint = compose(paired, column_state)
        if not kernel_equal(compose(swap, joint), joint):
            self_adjoint = False
            break

    return BalancedCrossCheck(defining, detailed, strong_as, self_adjoint)


@dataclass(frozen=True)
class SplitData:
    """A splitting e = ι∘π with π∘ι = id, plus the class structure:
    recurrent classes (label sets, one per middle element) and the
    transient labels, which partition the carrier."""

    middle: FinObject
    projection: Kernel
    inclusion: Kernel
    classes: tuple[tuple[str, ...], ...]
    transient: tuple[str, ...]

    def __post_init__(self) -> None:
        seen: set = set()
        for cls in self.classes:
            if seen & set(cls):
                raise StructureViolation("recurrent classes must be disjoint")
            seen |= set(cls)
        if seen & set(self.transient):
            raise StructureViolation("transient states cannot be recurrent")


def blackwell_split(e: Kernel) -> SplitData:
    """Split a stochastic idempotent through its recurrent classes.

    Builds the reachability digraph x→y iff e(y|x) > 0, takes the
    strongly connected components with no outgoing edges as recurrent
    classes, includes each class via its common column of e, and projects
    each state to a class with the mass e assigns to that class.
    """
    if e.kind is not Kind.STOCH:
        from .asrel import UnsupportedKind

        raise UnsupportedKind("the class decomposition applies to stochastic kernels")
    if e.dom != e.cod:
        raise NotEndo("splitting applies to endomorphisms")
    if _first_idempotency_violation(e) is not None:
        raise NotIdempotent("splitting applies to idempotents")

    n = e.dom.size
    adjacency = [
        [y for y in range(n) if e.matrix[y][x] > 0] for x in range(n)
    ]
    components = strongly_connected_components(adjacency)
    comp_of = {}
    for ci, comp in enumerate(components):
        for v in comp:
            comp_of[v] = ci
    recurrent = []
    for ci, comp in enumerate(components):
        if all(comp_of[y] == ci for x in comp for y in adjacency[x]):
            recurrent.append(sorted(comp))
    recurrent.sort(key=min)

    labels = e.dom.labels
    classes = tuple(tuple(labels[i] for i in comp) for comp in recurrent)
    class_index = {i: t for t, comp in enumerate(recurrent) for i in comp}
    transient = tuple(labels[i] for i in range(n) if i not in class_index)
    middle = fin_object("C_" + labels[comp[0]] for comp in recurrent)

    # inclusion: the column of e at any member, identical across the class
    iota_cols = []
    for comp in recurrent:
        col = e.column(comp[0])
        for member in comp[1:]:
            if e.column(member) != col:
                raise StructureViolation("columns differ within a recurrent class")
        if set(i for i, v in enumerate(col) if v > 0) != set(comp):
            raise StructureViolation("class column must have full support on its class")
        iota_cols.append(col)
    iota = Kernel(
        Kind.STOCH, middle, e.cod, tuple(tuple(c[i] for c in iota_cols) for i in range(n))
    )

    # projection is forced by e = ι∘π: π(t|x) = e(C_t|x)
    pi_rows = []
    for t, comp in enumerate(recurrent):
        pi_rows.append(tuple(sum((e.matrix[i][x] for i in comp), Fraction(0)) for x in range(n)))
    pi = Kernel(Kind.STOCH, e.dom, middle, tuple(pi_rows))

    if not kernel_equal(compose(pi, iota), identity(middle, Kind.STOCH)):
        raise StructureViolation("projection does not retract the inclusion")
    if not kernel_equal(compose(iota, pi), e):
        raise StructureViolation("inclusion∘projection does not rebuild the idempotent")
    for x in range(n):
        if any(e.matrix[e.dom.index(lbl)][x] != 0 for lbl in transient):
            raise StructureViolation("the idempotent feeds mass into transient states")

    report = classify(e)
    if is_deterministic(iota) != report.static or is_deterministic(pi) != report.strong:
        raise StructureViolation("splitting determinism disagrees with the taxonomy")
    return SplitData(middle, pi, iota, classes, transient)


def strongly_connected_components(adjacency: Sequence[Sequence[int]]) -> list[list[int]]:
    """Iterative Tarjan; components listed in a deterministic order."""
    n = len(adjacency)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(pi, len(adjacency[v])):
                u = adjacency[v][k]
                if index[u] == -1:
                    work[-1] = (v, k + 1)
                    work.append((u, 0))
                    advanced = True
                    break
                if on_stack[u]:
                    low[v] = min(low[v], index[u])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    comp.append(u)
                    if u == v:
                        break
                components.append(comp)
    return components


@dataclass(frozen=True)
class NoSplitUpTo:
    """Negative search result: no splitting with a middle object of size
    up to ``max_size`` exists."""

    max_size: int


def _multi_columns(n: int) -> list[tuple[bool, ...]]:
    return [tuple(bool(m >> i & 1) for i in range(n)) for m in range(1, 2**n)]


def _grid_columns(n: int, grid: Sequence[Fraction]) -> list[tuple[Fraction, ...]]:
    cols = []
    for combo in itertools.product(grid, repeat=n):
        if all(v >= 0 for v in combo) and sum(combo, Fraction(0)) == 1:
            cols.append(tuple(combo))
    return cols


def search_split(
    e: Kernel,
    max_middle: int,
    entry_grid: Optional[Sequence[Fraction]] = None,
    candidate_bound: int = 10**7,
) -> SplitData | NoSplitUpTo:
    """Exhaustively search for a splitting with middle size 1..max_middle.

    Multi kernels are enumerated completely; stochastic kernels are
    enumerated over the declared entry grid.  Returns the first pair
    (projection-major, bitmask/lexicographic order) with π∘ι = id and
    ι∘π = e, else a NoSplitUpTo marker.
    """
    if e.dom != e.cod:
        raise NotEndo("splitting applies to endomorphisms")
    if _first_idempotency_violation(e) is not None:
        raise NotIdempotent("splitting applies to idempotents")
    if e.kind is Kind.STOCH and entry_grid is None:
        raise ValueError("stochastic search needs a declared entry grid")
    if e.kind is Kind.SIGNED:
        from .asrel import UnsupportedKind

        raise UnsupportedKind("no enumeration is defined for signed kernels")

    n = e.dom.size
    labels = e.dom.labels
    for t in range(1, max_middle + 1):
        middle = fin_object(f"t{i}" for i in range(t))
        if e.kind is Kind.MULTI:
            pi_cols = _multi_columns(t)
            iota_cols = _multi_columns(n)
        else:
            pi_cols = _grid_columns(t, entry_grid)
            iota_cols = _grid_columns(n, entry_grid)
        total = len(pi_cols) ** n * len(iota_cols) ** t
        if total > candidate_bound:
            raise SizeLimitExceeded(f"{total} candidates at middle size {t}")
        ident = identity(middle, e.kind)
        for pi_choice in itertools.product(pi_cols, repeat=n):
            pi = Kernel(
                e.kind, e.dom, middle, tuple(tuple(c[i] for c in pi_choice) for i in range(t))
            )
            for iota_choice in itertools.product(iota_cols, repeat=t):
                iota = Kernel(
                    e.kind, middle, e.cod, tuple(tuple(c[i] for c in iota_choice) for i in range(n))
                )
                if not kernel_equal(compose(pi, iota), ident):
                    continue
                if kernel_equal(compose(iota, pi), e):
                    classes = tuple(
                        tuple(
                            labels[i]
                            for i in range(n)
                            if (iota.matrix[i][s] if e.kind is Kind.MULTI else iota.matrix[i][s] > 0)
                        )
                        for s in range(t)
                    )
                    covered = {lbl for cls in classes for lbl in cls}
                    transient = tuple(l for l in labels if l not in covered)
                    return SplitData(middle, pi, iota, classes, transient)
    return NoSplitUpTo(max_middle)


def verify_split(e: Kernel, iota: Kernel, pi: Kernel) -> tuple[IdempotentReport, bool]:
    """Check a claimed splitting and the taxonomy it induces.

    Raises NotASplitting naming the first violated equation; returns the
    classification of e together with the verdict of the induced checks
    (inclusion deterministic ⟺ static, projection deterministic ⟺
    strong, projection deterministic almost surely w.r.t. the inclusion).
    """
    if pi.dom != e.dom or iota.cod != e.cod or pi.cod != iota.dom:
        raise ShapeMismatch("splitting pair does not compose with the idempotent")
    if not kernel_equal(compose(pi, iota), identity(iota.dom, e.kind)):
        raise NotASplitting("projection∘inclusion is not the identity")
    if not kernel_equal(compose(iota, pi), e):
        raise NotASplitting("inclusion∘projection does not equal the idempotent")
    report = classify(e)
    cop_mid = copy_kernel(pi.cod, e.kind)
    cop_dom = copy_kernel(pi.dom, e.kind)
    pi_as_det = ase_kernels(iota, compose(cop_mid, pi), compose(tensor(pi, pi), cop_dom))
    checks = (
        is_deterministic(iota) == report.static
        and is_deterministic(pi) == report.strong
        and pi_as_det
    )
    # the equivalences are theorems for the positive kinds only
    assert checks or e.kind is Kind.SIGNED
    return report, checks


@dataclass(frozen=True)
class CauchySchwarzInstance:
    antecedent: bool
    consequent: bool

    @property
    def implication_ok(self) -> bool:
        return (not self.antecedent) or self.consequent


def cauchy_schwarz(f: Kernel, g: Kernel, h: Kernel) -> CauchySchwarzInstance:
    """One instance of the Cauchy-Schwarz implication along f: A→B,
    g: B→X, h: X→Y.

    antecedent: the two-sample joint of h after g, averaged over f,
    factorizes through a single sample:
        Σ_b f(b|a)·(hg)(y₁|b)·(hg)(y₂|b) = Σ_b f(b|a)·Σ_x h(y₁|x)h(y₂|x)g(x|b)
    consequent: for every b reached by f, h is g(·|b)-almost surely the
    constant (hg)(·|b):
        g(x|b)·h(y|x) = g(x|b)·(hg)(y|b).
    """
    if f.kind is not g.kind or g.kind is not h.kind:
        raise ShapeMismatch("all three kernels must have the same kind")
    if f.cod != g.dom or g.cod != h.dom:
        raise ShapeMismatch("kernels must form a chain A→B→X→Y")
    kind = f.kind
    hg = compose(h, g)
    na, nb, nx, ny = f.dom.size, f.cod.size, g.cod.size, h.cod.size

    antecedent = True
    for a in range(na):
        for y1 in range(ny):
            for y2 in range(ny):
                if kind is Kind.MULTI:
                    lhs = any(
                        f.matrix[b][a] and hg.matrix[y1][b] and hg.matrix[y2][b]
                        for b in range(nb)
                    )
                    rhs = any(
                        f.matrix[b][a] and h.matrix[y1][x] and h.matrix[y2][x] and g.matrix[x][b]
                        for b in range(nb)
                        for x in range(nx)
                    )
                else:
                    lhs = sum(
                        (f.matrix[b][a] * hg.matrix[y1][b] * hg.matrix[y2][b] for b in range(nb)),
                        Fraction(0),
                    )
                    rhs = sum(
                        (
                            f.matrix[b][a]
                            * sum(
                                (h.matrix[y1][x] * h.matrix[y2][x] * g.matrix[x][b] for x in range(nx)),
                                Fraction(0),
                            )
                            for b in range(nb)
                        ),
                        Fraction(0),
                    )
                if lhs != rhs:
                    antecedent = False
                    break
            if not antecedent:
                break
        if not antecedent:
            break

    consequent = True
    reached = set(support_indices(f))
    for b in range(nb):
        if b not in reached:
            continue
        for x in range(nx):
            for y in range(ny):
                lhs = _mul(kind, g.matrix[x][b], h.matrix[y][x])
                rhs = _mul(kind, g.matrix[x][b], hg.matrix[y][b])
                if lhs != rhs:
                    consequent = False
                    break
            if not consequent:
                break
        if not consequent:
            break

    return CauchySchwarzInstance(antecedent, consequent)


@dataclass(frozen=True)
class ClassStructure:
    """Generating data for a random splitting-built idempotent."""

    classes: tuple[tuple[str, ...], ...]
    transient: tuple[str, ...]
    iota: Kernel
    pi: Kernel

    @property
    def idempotent(self) -> Kernel:
        return compose(self.iota, self.pi)


def random_class_idempotent(rng: random.Random, x: FinObject) -> ClassStructure:
    """Random stochastic idempotent built from a random class structure.

    Partitions the elements into nonempty recurrent classes plus a
    transient remainder, draws a full-support distribution per class and
    an arbitrary class mixture per transient state, and assembles
    e = ι∘π.
    """
    n = x.size
    if n == 0:
        raise ShapeMismatch("need at least one element")
    order = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.randrange(i + 1)
        order[i], order[j] = order[j], order[i]
    k = 1 + rng.randrange(n)
    members: list[list[int]] = [[order[t]] for t in range(k)]
    transient: list[int] = []
    for i in order[k:]:
        slot = rng.randrange(k + 1)
        if slot == k:
            transient.append(i)
        else:
            members[slot].append(i)
    members = sorted([sorted(m) for m in members], key=min)
    transient.sort()

    middle = fin_object(f"t{t}" for t in range(k))
    iota_cols = []
    for comp in members:
        dist = random_full_support_column(rng, len(comp))
        col = [Fraction(0)] * n
        for pos, i in enumerate(comp):
            col[i] = dist[pos]
        iota_cols.append(col)
    iota = Kernel(Kind.STOCH, middle, x, tuple(tuple(c[i] for c in iota_cols) for i in range(n)))

    class_of = {i: t for t, comp in enumerate(members) for i in comp}
    pi_cols = []
    for i in range(n):
        if i in class_of:
            col = [Fraction(0)] * k
            col[class_of[i]] = Fraction(1)
        else:
            col = random_stoch_column(rng, k)
        pi_cols.append(col)
    pi = Kernel(Kind.STOCH, x, middle, tuple(tuple(c[t] for c in pi_cols) for t in range(k)))

    return ClassStructure(
        tuple(tuple(x.labels[i] for i in comp) for comp in members),
        tuple(x.labels[i] for i in transient),
        iota,
        pi,
    )
