"""Seeded generators for objects and kernels.

Only `random.Random.randrange` is used, so outputs are reproducible
across platforms and Python versions for a fixed seed.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .kernel import FinObject, Kernel, Kind, fin_object


def rng_from_seed(seed: int) -> random.Random:
    return random.Random(seed)


def random_object(rng: random.Random, max_size: int, prefix: str = "x", min_size: int = 1) -> FinObject:
    n = min_size + rng.randrange(max_size - min_size + 1)
    return fin_object(f"{prefix}{i}" for i in range(n))


def random_stoch_column(rng: random.Random, n: int, max_weight: int = 4) -> list[Fraction]:
    """Random distribution over n outcomes; zero entries are common."""
    weights = [rng.randrange(max_weight + 1) for _ in range(n)]
    if not any(weights):
        weights[rng.randrange(n)] = 1
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def random_full_support_column(rng: random.Random, n: int, max_weight: int = 4) -> list[Fraction]:
    weights = [1 + rng.randrange(max_weight) for _ in range(n)]
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def random_signed_column(rng: random.Random, n: int, span: int = 3, denom: int = 4) -> list[Fraction]:
    """Entries in [-span, span]/denom with the last one fixed so the sum is 1."""
    col = [Fraction(rng.randrange(-span, span + 1), denom) for _ in range(n - 1)]
    col.append(Fraction(1) - sum(col, Fraction(0)))
    return col


def random_multi_column(rng: random.Random, n: int) -> list[bool]:
    mask = 1 + rng.randrange(2**n - 1)
    return [bool(mask >> i & 1) for i in range(n)]


def random_kernel(rng: random.Random, kind: Kind, dom: FinObject, cod: FinObject) -> Kernel:
    if cod.size == 0:
        if dom.size != 0:
            raise ValueError("no valid kernel into an empty object from a nonempty one")
        return Kernel(kind, dom, cod, ())
    cols = []
    for _ in range(dom.size):
        if kind is Kind.STOCH:
            cols.append(random_stoch_column(rng, cod.size))
        elif kind is Kind.SIGNED:
            cols.append(random_signed_column(rng, cod.size))
        else:
            cols.append(random_multi_column(rng, cod.size))
    rows = tuple(tuple(cols[j][i] for j in range(dom.size)) for i in range(cod.size))
    return Kernel(kind, dom, cod, rows)


def random_deterministic_kernel(rng: random.Random, kind: Kind, dom: FinObject, cod: FinObject) -> Kernel:
    assignment = [rng.randrange(cod.size) for _ in range(dom.size)]
    one = True if kind is Kind.MULTI else Fraction(1)
    zero = False if kind is Kind.MULTI else Fraction(0)
    rows = tuple(
        tuple(one if assignment[j] == i else zero for j in range(dom.size))
        for i in range(cod.size)
    )
    return Kernel(kind, dom, cod, rows)


def random_column(rng: random.Random, kind: Kind, n: int):
    if kind is Kind.STOCH:
        return random_stoch_column(rng, n)
    if kind is Kind.SIGNED:
        return random_signed_column(rng, n)
    return random_multi_column(rng, n)


def random_kernel_supported_on(
    rng: random.Random, kind: Kind, dom: FinObject, cod: FinObject, allowed_rows: list[int]
) -> Kernel:
    """Random kernel whose columns only hit the given codomain rows."""
    zero = False if kind is Kind.MULTI else Fraction(0)
    cols = []
    for _ in range(dom.size):
        inner = random_column(rng, kind, len(allowed_rows))
        col = [zero] * cod.size
        for pos, i in enumerate(allowed_rows):
            col[i] = inner[pos]
        cols.append(col)
    rows = tuple(tuple(cols[j][i] for j in range(dom.size)) for i in range(cod.size))
    return Kernel(kind, dom, cod, rows)
