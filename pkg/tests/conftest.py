"""Shared generators and batteries for the test suite.

Randomness is always seeded per test so failures replay exactly.
"""

from __future__ import annotations

import random

import pytest

from ultradiv import filters as fl
from ultradiv import setalg as sa


def random_periodic(rnd: random.Random, max_modulus: int = 20,
                    correction_span: int = 60) -> sa.PeriodicSet:
    m = rnd.randint(1, max_modulus)
    residues = [r for r in range(m) if rnd.random() < 0.45]
    added = {rnd.randint(1, correction_span) for _ in range(rnd.randint(0, 2))}
    removed = {rnd.randint(1, correction_span) for _ in range(rnd.randint(0, 2))}
    return sa.periodic(m, residues, added - removed, removed - added)


def random_nonempty_periodic(rnd: random.Random, **kw) -> sa.PeriodicSet:
    while True:
        ps = random_periodic(rnd, **kw)
        if not ps.is_empty():
            return ps


_PRIMITIVE_MAKERS = (
    lambda rnd: sa.AllN(),
    lambda rnd: sa.Multiples(rnd.randint(1, 12)),
    lambda rnd: sa.Progression(rnd.randint(1, 10), rnd.randint(1, 8)),
    lambda rnd: sa.FiniteSet({rnd.randint(1, 40) for _ in range(rnd.randint(0, 4))}),
    lambda rnd: sa.Tail(rnd.randint(1, 30)),
)


def random_expr(rnd: random.Random, depth: int = 4,
                allow_primes: bool = False) -> sa.SetExpr:
    if depth <= 0 or rnd.random() < 0.3:
        if allow_primes and rnd.random() < 0.15:
            return sa.Primes()
        return rnd.choice(_PRIMITIVE_MAKERS)(rnd)
    kind = rnd.randrange(6)
    if kind == 0:
        return sa.Complement(random_expr(rnd, depth - 1, allow_primes))
    if kind == 1:
        return sa.Union(random_expr(rnd, depth - 1, allow_primes),
                        random_expr(rnd, depth - 1, allow_primes))
    if kind == 2:
        return sa.Intersect(random_expr(rnd, depth - 1, allow_primes),
                            random_expr(rnd, depth - 1, allow_primes))
    if kind == 3:
        return sa.Quotient(random_expr(rnd, depth - 1, allow_primes),
                           rnd.randint(1, 6))
    if kind == 4:
        return sa.Scale(rnd.randint(1, 4), random_expr(rnd, depth - 1, allow_primes))
    return sa.UpClosure(random_expr(rnd, depth - 1, allow_primes))


def random_base(rnd: random.Random, allow_chains: bool = True,
                allow_primes: bool = False) -> fl.FilterBase:
    """A filter base that satisfies FIP by construction.

    Every generator contains a common seed class, so finite intersections
    stay infinite; chains are added only when compatible with the seed.
    """
    m = rnd.randint(1, 10)
    want_lcm = allow_chains and rnd.random() < 0.25
    r = 0 if want_lcm else rnd.randrange(m)
    seed = sa.periodic(m, (r,))
    gens: list[sa.SetExpr] = []
    for _ in range(rnd.randint(1, 3)):
        noise = random_periodic(rnd, max_modulus=12, correction_span=40)
        gens.append(sa.Canonical(seed.union(noise)))
    if allow_primes and not want_lcm and rnd.random() < 0.2:
        # a primes generator keeps FIP: the seed class can be chosen coprime
        if sa.periodic(m, (r,)).primes_in() == "infinite":
            gens.append(sa.Primes())
    chains: list = []
    if want_lcm:
        chains.append(fl.LcmChain())
    elif allow_chains and rnd.random() < 0.35:
        chains.append(fl.TailChain())
    return fl.FilterBase(gens, chains)


@pytest.fixture
def rnd() -> random.Random:
    return random.Random(0xD1F)


#: mixed bag of canonical sets exercising residues, corrections and tails
def battery_sets() -> list[sa.PeriodicSet]:
    out = [
        sa.ALL,
        sa.EMPTY,
        sa.multiples(1),
        sa.multiples(2),
        sa.multiples(6),
        sa.multiples(7),
        sa.periodic(4, (1, 3)),
        sa.periodic(6, (0, 3)),
        sa.progression(5, 4),
        sa.tail(17),
        sa.from_finite({1}),
        sa.from_finite({4, 6}),
        sa.from_finite({3, 5, 15}),
        sa.periodic(12, (0, 4, 8), added={5}, removed={12}),
        sa.multiples(2).union(sa.from_finite({9})),
        sa.multiples(3).difference(sa.from_finite({3})),
    ]
    return out
