"""Divisibility calculus on filter bases.

Divisibility by a natural n collapses to a single entailment (nN accepted),
which simultaneously settles left-, right-, mid- and extension-divisibility
by n.  Between two bases the extension relation is evaluated through upward
closures of cores, cross-validated against the upward-closed-generator
criterion; left-divisibility is only semi-decidable from a base and is
implemented as an exact test on principal points plus sound refutations
elsewhere.  The divisor-pattern builder realizes prescribed divisor sets
with lcm witnesses, and the prime/irreducibility procedures follow the exact
quotient trichotomies of the multiples-of-a-prime and the primes themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from . import setalg
from ._numbers import is_prime, smallest_prime_factor
from .filters import (DEFAULT_DEPTH_LIMIT, AffineMap, FilterBase, LazyMap,
                      MapDescriptor, Verdict, entailed, entails, pushforward,
                      refuted, unknown)
from .relext import DIV, CoherenceError, ext_related
from .setalg import (Complement, FiniteSet, LazySet, Multiples, NotRepresentableError,
                     PeriodicSet, Primes, SetExpr, as_canonical,
                     closure_predicates, multiples, quotient_classes,
                     try_normalize)


# ---------------------------------------------------------------------------
# divisibility by naturals and between bases
# ---------------------------------------------------------------------------


def divides_nat(n: int, p: FilterBase, *,
                depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Verdict:
    """Does n divide (every ultrafilter extension of) p?

    Acceptance of the multiples of n settles all four divisibility notions
    by a natural at once.
    """
    if n < 1:
        raise ValueError("divisor must be >= 1")
    return entails(p, Multiples(n), depth_limit=depth_limit)


def widemid(p: FilterBase, q: FilterBase, *,
            depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Verdict:
    """Extension-divisibility between bases (images are upward closures).

    The core judgment is cross-validated generator by generator: an accepted
    pair can never refute the upward closure of a generator (that would
    break the filter property), while a generator-level refutation soundly
    sharpens an Unknown core verdict.
    """
    v = ext_related(DIV, p, q, depth_limit=depth_limit)
    for g in p.generators:
        w = _entails_up_closure(q, g, depth_limit)
        if v.is_entailed() and w.is_refuted():
            raise CoherenceError(
                f"upward closure of generator {g.render()} refuted while the "
                f"core image is entailed")
        if v.is_unknown() and w.is_refuted():
            v = refuted(w.witness)
    return v


def _entails_up_closure(q: FilterBase, g: SetExpr, depth_limit: int) -> Verdict:
    try:
        up = setalg.up_closure(g)
    except NotRepresentableError as err:
        if err.lower is not None and \
                entails(q, err.lower, depth_limit=depth_limit).is_entailed():
            return entailed(err.lower)
        if err.upper is not None and \
                entails(q, err.upper, depth_limit=depth_limit).is_refuted():
            return refuted(err.upper)
        return unknown(depth_limit)
    return entails(q, up, depth_limit=depth_limit)


def cfilter_entails(p: FilterBase, a: "PeriodicSet | SetExpr", *,
                    depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Verdict:
    """Membership of a in the filter of sets all of whose quotients are
    accepted by p: a finite conjunction over the quotient classes."""
    a = as_canonical(a)
    saw_unknown = False
    for cond, value in quotient_classes(a):
        v = entails(p, value, depth_limit=depth_limit)
        if v.is_refuted():
            return refuted(cond.min_element())
        if v.is_unknown():
            saw_unknown = True
    return unknown(depth_limit) if saw_unknown else entailed()


def dfilter_entails(p: FilterBase, a: "PeriodicSet | SetExpr", *,
                    depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Verdict:
    """Membership of a in the filter of sets whose full-multiple kernel is
    accepted by p: a single entailment of bset(a)."""
    return entails(p, as_canonical(a).bset(), depth_limit=depth_limit)


def leftdiv(p: FilterBase, q: FilterBase, *,
            probe_multiples: int = 32,
            depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Verdict:
    """Left-divisibility test; exact on principal p, sound refutation
    otherwise.

    A set provably accepted by every quotient of p but refuted by q kills
    the factorization; a positive answer would quantify over the whole
    quotient-closed filter of p, which a finite base cannot certify unless
    p is principal.
    """
    pv = p.principal_value
    if pv is not None:
        return divides_nat(pv, q, depth_limit=depth_limit)
    for a in _leftdiv_probes(p, q, probe_multiples):
        if cfilter_entails(p, a, depth_limit=depth_limit).is_entailed() and \
                entails(q, a, depth_limit=depth_limit).is_refuted():
            return refuted(a)
    return unknown(depth_limit)


def _leftdiv_probes(p: FilterBase, q: FilterBase,
                    probe_multiples: int) -> list[PeriodicSet]:
    probes: list[PeriodicSet] = []
    seen = set()

    def push(ps: Optional[PeriodicSet]) -> None:
        if ps is not None and ps not in seen and not ps.is_empty():
            seen.add(ps)
            probes.append(ps)

    for g in list(p.generators) + list(q.generators):
        ps = try_normalize(g)
        push(ps)
        if ps is not None:
            for _, value in quotient_classes(ps):
                push(value)
    for n in range(1, probe_multiples + 1):
        push(multiples(n))
    return probes


# ---------------------------------------------------------------------------
# divisor patterns
# ---------------------------------------------------------------------------


class PatternError(ValueError):
    def __init__(self, report: setalg.ClosureReport):
        super().__init__(report.describe())
        self.report = report


@dataclass(frozen=True)
class DivisorPattern:
    """A prescribed divisor set: membership rule plus a truncation bound.

    Valid patterns are downward closed under divisibility and closed under
    lcm on [1, bound]."""

    predicate: SetExpr
    bound: int

    @staticmethod
    def of(rule: "SetExpr | Callable[[int], bool] | Sequence[int]",
           bound: int) -> "DivisorPattern":
        if isinstance(rule, SetExpr):
            return DivisorPattern(rule, bound)
        if callable(rule):
            return DivisorPattern(LazySet("pattern", rule), bound)
        return DivisorPattern(FiniteSet(rule), bound)


@dataclass(frozen=True)
class PatternResult:
    """Filter base realizing a divisor pattern, with its lcm witness map."""

    base: FilterBase
    members: tuple[int, ...]
    nonmembers: tuple[int, ...]

    def witness(self, positives: Sequence[int] = (),
                negatives: Sequence[int] = ()) -> int:
        """The lcm witness of a finite subfamily selection: lies in every
        selected positive generator and avoids every selected negative one."""
        pos = set(positives)
        neg = set(negatives)
        if not pos <= set(self.members) or not neg <= set(self.nonmembers):
            raise ValueError("selection outside the emitted base")
        d = math.lcm(*pos) if pos else 1
        for n in pos:
            if d % n:
                raise CoherenceError(f"lcm witness {d} escaped {n}N")
        for b in neg:
            if d % b == 0:
                raise CoherenceError(f"lcm witness {d} fell into excluded {b}N")
        return d

    def signed_generators(self) -> list[tuple[int, bool]]:
        return [(n, True) for n in self.members] + \
               [(b, False) for b in self.nonmembers]


def build_divisor_pattern(dp: DivisorPattern) -> PatternResult:
    """Base forcing divisibility by exactly the pattern members up to the
    bound, plus the witness map certifying the finite intersection property.

    The witness for a selection is the lcm of its positive part: closure of
    the pattern keeps it clear of every excluded multiple class.
    """
    report = closure_predicates(dp.predicate, dp.bound)
    if not report.passed:
        raise PatternError(report)
    members = tuple(n for n in range(1, dp.bound + 1) if dp.predicate.member(n))
    nonmembers = tuple(n for n in range(1, dp.bound + 1) if n not in set(members))
    gens: list[SetExpr] = [Multiples(n) for n in members]
    gens += [Complement(Multiples(b)) for b in nonmembers]
    d_all = math.lcm(*members) if members else 1
    base = FilterBase(gens, known_witness=d_all)
    return PatternResult(base, members, nonmembers)


# ---------------------------------------------------------------------------
# primes
# ---------------------------------------------------------------------------


class CompositeFactorError(ValueError):
    def __init__(self, n: int):
        d = smallest_prime_factor(n) if n > 1 else 1
        super().__init__(f"{n} is not prime: {n} = {d} * {n // d}")
        self.n = n
        self.factorization = (d, n // d)


def prime_divides_product(n: int, p: FilterBase, q: FilterBase, *,
                          depth_limit: int = DEFAULT_DEPTH_LIMIT,
                          ) -> tuple[Verdict, Optional[str]]:
    """Does the prime n divide the product of p and q, and through which
    factor?

    The quotient of nN by m is everything when n divides m and nN itself
    otherwise, so the factor set is either all of N (branch y: q is
    divisible) or nN itself (branch x: p must be divisible).
    """
    if n < 2 or not is_prime(n):
        raise CompositeFactorError(n)
    pv, qv = p.principal_value, q.principal_value
    if pv is not None and qv is not None:
        if (pv * qv) % n:
            return (REFUTED_PLAIN, None)
        return (ENTAILED_PLAIN, "y" if qv % n == 0 else "x")
    v_y = divides_nat(n, q, depth_limit=depth_limit)
    if v_y.is_entailed():
        return (entailed(), "y")
    v_x = divides_nat(n, p, depth_limit=depth_limit)
    if v_y.is_refuted():
        # factor set is exactly nN
        if v_x.is_entailed():
            return (entailed(), "x")
        return (v_x, None)
    # q side unknown: factor set sits between nN and N
    if v_x.is_entailed():
        return (entailed(), "x")
    return (unknown(depth_limit), None)


ENTAILED_PLAIN = entailed()
REFUTED_PLAIN = refuted()


@dataclass(frozen=True)
class IrreducibilityCertificate:
    """Trichotomy record certifying irreducibility of a primes-entailing
    point: any factorization forces a trivial factor.

    Each record pairs a tested n with the quotient case of the primes by n:
    "identity" (n = 1), "unit" (n prime, quotient {1}), or "empty"
    (n composite).
    """

    records: tuple[tuple[int, str], ...]
    conclusion: str

    def consistent(self) -> bool:
        return all(case == _primes_quotient_case(n) for n, case in self.records)


def _primes_quotient_case(n: int) -> str:
    if n == 1:
        return "identity"
    return "unit" if is_prime(n) else "empty"


def irreducible_over_P(p: FilterBase, *, record_bound: int = 24,
                       depth_limit: int = DEFAULT_DEPTH_LIMIT,
                       ) -> Optional[IrreducibilityCertificate]:
    """Certificate of irreducibility when p accepts the primes; None when
    that acceptance is refuted or unknown (the converse direction is not
    finitely testable)."""
    v = entails(p, Primes(), depth_limit=depth_limit)
    if not v.is_entailed():
        return None
    records = tuple((n, _primes_quotient_case(n)) for n in range(1, record_bound + 1))
    return IrreducibilityCertificate(
        records,
        "factor sets are {1} at primes and empty at composites, so any "
        "factorization has a trivial factor")


# ---------------------------------------------------------------------------
# monotone maps
# ---------------------------------------------------------------------------


def spf_reduction_map() -> LazyMap:
    """m -> m / smallest-prime-factor(m), with 1 fixed."""

    def fn(m: int) -> int:
        return 1 if m == 1 else m // smallest_prime_factor(m)

    def preimage(m: int) -> SetExpr:
        if m == 1:
            # 1 and every prime reduce to 1
            return setalg.Union(FiniteSet({1}), Primes())
        return FiniteSet({m * p for p in _primes_upto_spf(m)})

    return LazyMap("spf-reduction", fn, preimage)


def _primes_upto_spf(m: int) -> list[int]:
    from ._numbers import primes_up_to
    return primes_up_to(smallest_prime_factor(m))


def squaring_map() -> LazyMap:
    def preimage(m: int) -> SetExpr:
        r = math.isqrt(m)
        return FiniteSet({r} if r * r == m else set())

    return LazyMap("square", lambda n: n * n, preimage)


def identity_map() -> AffineMap:
    return AffineMap(1, 0)


@dataclass(frozen=True)
class MonotoneMapReport:
    """Outcome of the divisor-compatible-map checks.

    part_a: the image point divides the original (requires f(m) | m).
    part_b: divisibility of images follows divisibility of points
    (requires f monotone for divisibility); skipped when the premise between
    p and q is not established.
    """

    map_name: str
    shrinking_ok: bool
    shrinking_counterexample: Optional[int]
    part_a: Optional[Verdict]
    monotone_ok: Optional[bool] = None
    monotone_counterexample: Optional[tuple[int, int]] = None
    premise: Optional[Verdict] = None
    part_b: Optional[Verdict] = None


def monotone_map_div(f: MapDescriptor, p: FilterBase,
                     q: Optional[FilterBase] = None, *,
                     hypothesis_bound: int = 10_000,
                     depth_limit: int = DEFAULT_DEPTH_LIMIT) -> MonotoneMapReport:
    """Check the divisor-map laws for f against p (and q when given).

    The shrinking law f(m) | m is verified on [1, hypothesis_bound] before
    asserting that the pushforward of p extension-divides p; the
    monotonicity law is verified on divisor pairs before comparing
    pushforwards of an established pair.
    """
    for m in range(1, hypothesis_bound + 1):
        if m % f.apply(m):
            return MonotoneMapReport(f.name, False, m, None)
    fp = pushforward(f, p)
    part_a = widemid(fp, p, depth_limit=depth_limit)
    if q is None:
        return MonotoneMapReport(f.name, True, None, part_a)
    for n in range(1, hypothesis_bound + 1):
        for m in _divisor_list(n):
            if f.apply(n) % f.apply(m):
                return MonotoneMapReport(f.name, True, None, part_a,
                                         monotone_ok=False,
                                         monotone_counterexample=(m, n))
    premise = widemid(p, q, depth_limit=depth_limit)
    if not premise.is_entailed():
        return MonotoneMapReport(f.name, True, None, part_a,
                                 monotone_ok=True, premise=premise)
    part_b = widemid(fp, pushforward(f, q), depth_limit=depth_limit)
    return MonotoneMapReport(f.name, True, None, part_a, monotone_ok=True,
                             premise=premise, part_b=part_b)


def _divisor_list(n: int) -> list[int]:
    from ._numbers import divisors
    return divisors(n)


# ---------------------------------------------------------------------------
# five-equivalence reconstruction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuotientBaseReconstruction:
    """Constructive content of divisibility by n: the quotient base, its
    intersection-property status, and whether scaling it back entails every
    original generator."""

    ok: bool
    base: Optional[FilterBase]
    entails_generators: Optional[bool]


def quotient_base_reconstruction(n: int, p: FilterBase, *,
                                 depth_limit: int = DEFAULT_DEPTH_LIMIT,
                                 ) -> QuotientBaseReconstruction:
    """Build the base of generator quotients by n and check it reproduces p
    under left multiplication; feasible exactly when n divides p."""
    from .filters import CustomChain, FipError, FipUndecidableError
    from .product import left_mult

    gens: list[SetExpr] = []
    for g in p.generators:
        ps = try_normalize(g)
        if ps is not None:
            gens.append(setalg.Canonical(ps.quotient(n)))
        else:
            gens.append(setalg.Quotient(g, n))
    chains = [CustomChain(f"({ch.render()})/{n}",
                          lambda k, _c=ch, _n=n: setalg.Quotient(_c.element(k), _n))
              for ch in p.chains]
    try:
        base = FilterBase(gens, chains)
    except (FipError, FipUndecidableError):
        return QuotientBaseReconstruction(False, None, None)
    back = left_mult(n, base)
    all_entailed = True
    for g in p.generators:
        v = entails(back, g, depth_limit=depth_limit)
        if v.is_refuted():
            raise CoherenceError(
                f"scaled quotient base refutes original generator {g.render()}")
        if not v.is_entailed():
            all_entailed = False
    return QuotientBaseReconstruction(True, base, all_entailed)
