"""Filter bases on N and three-valued entailment.

A :class:`FilterBase` is a finite family of generator sets together with
optional descending chains; it stands for the filter generated by closing
the family under supersets and finite intersections, and approximates the
ultrafilters extending that filter.

The central judgment is :func:`entails`: whether a query set belongs to
every ultrafilter extending the base (Entailed), to none (Refuted), or is
undetermined by the base (Unknown).  Entailed means some finite intersection
of generators and chain elements sits inside the query set; Refuted means
one sits inside its complement.  Descending built-in chains make these
"exists a depth" questions decidable exactly by stabilization; custom chains
are explored up to a depth limit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Optional, Sequence

from . import setalg
from ._numbers import is_prime, lcm_upto
from .setalg import (ALL, EMPTY, Canonical, Complement, FiniteSet, Intersect,
                     ModulusOverflow, Multiples, PeriodicSet, Primes, Quotient,
                     Scale, SetExpr, Tail, Union, as_expr, from_finite,
                     try_normalize)

DEFAULT_DEPTH_LIMIT = 64
DEFAULT_SCAN_BOUND = 100_000

#: working-modulus ceiling when folding generator conjunctions eagerly;
#: conjuncts beyond it stay as separate "extra" factors of the core
_CORE_FOLD_BUDGET = 100_000


# ---------------------------------------------------------------------------
# three-valued verdicts
# ---------------------------------------------------------------------------


class Outcome(Enum):
    ENTAILED = "entailed"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    """Three-valued answer with optional witness and evidence bound.

    The witness is a natural (a separating element) or a canonical set (one
    side of a subset proof); for Unknown, evidence_bound records the universe
    bound or chain depth examined before giving up.
    """

    outcome: Outcome
    witness: "int | PeriodicSet | None" = None
    evidence_bound: Optional[int] = None

    def is_entailed(self) -> bool:
        return self.outcome is Outcome.ENTAILED

    def is_refuted(self) -> bool:
        return self.outcome is Outcome.REFUTED

    def is_unknown(self) -> bool:
        return self.outcome is Outcome.UNKNOWN

    def decided(self) -> bool:
        return self.outcome is not Outcome.UNKNOWN

    def contradicts(self, other: "Verdict") -> bool:
        return (self.is_entailed() and other.is_refuted()) or \
               (self.is_refuted() and other.is_entailed())

    def __repr__(self) -> str:
        bits = [self.outcome.value]
        if self.witness is not None:
            bits.append(f"witness={self.witness!r}")
        if self.evidence_bound is not None:
            bits.append(f"bound={self.evidence_bound}")
        return f"Verdict({', '.join(bits)})"


ENTAILED = Verdict(Outcome.ENTAILED)
REFUTED = Verdict(Outcome.REFUTED)
UNKNOWN = Verdict(Outcome.UNKNOWN)


def entailed(witness=None) -> Verdict:
    return ENTAILED if witness is None else Verdict(Outcome.ENTAILED, witness)


def refuted(witness=None) -> Verdict:
    return REFUTED if witness is None else Verdict(Outcome.REFUTED, witness)


def unknown(evidence_bound: Optional[int] = None) -> Verdict:
    return UNKNOWN if evidence_bound is None else Verdict(Outcome.UNKNOWN, None, evidence_bound)


def from_bool(b: bool, witness=None) -> Verdict:
    return entailed(witness) if b else refuted(witness)


# ---------------------------------------------------------------------------
# chains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LcmChain:
    """k -> lcm(1..k) * N; entailed sets are those hit by every multiple class."""

    def element(self, k: int) -> SetExpr:
        return Multiples(lcm_upto(k))

    def normalized_element(self, k: int) -> Optional[PeriodicSet]:
        try:
            return setalg.multiples(lcm_upto(k))
        except ModulusOverflow:
            return None

    def render(self) -> str:
        return "lcmchain"


@dataclass(frozen=True)
class TailChain:
    """k -> [k, inf); realizes escape to infinity (cofinite membership)."""

    def element(self, k: int) -> SetExpr:
        return Tail(k)

    def normalized_element(self, k: int) -> Optional[PeriodicSet]:
        return setalg.tail(k)

    def render(self) -> str:
        return "tailchain"


@dataclass(frozen=True)
class CustomChain:
    """User-supplied descending chain; verified descending on a prefix and
    explored only up to the configured depth limit."""

    name: str
    rule: Callable[[int], SetExpr] = field(compare=False)
    check_prefix: int = 8
    _norm_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def element(self, k: int) -> SetExpr:
        return self.rule(k)

    def normalized_element(self, k: int) -> Optional[PeriodicSet]:
        if k not in self._norm_cache:
            try:
                self._norm_cache[k] = try_normalize(self.rule(k))
            except ModulusOverflow:
                self._norm_cache[k] = None
        return self._norm_cache[k]

    def render(self) -> str:
        return self.name

    def validate(self) -> None:
        prev: Optional[PeriodicSet] = None
        for k in range(1, self.check_prefix + 1):
            cur = self.normalized_element(k)
            if cur is None:
                break  # lazily-valued chains are allowed; depth use is bounded anyway
            if prev is not None and not cur.is_subset(prev):
                raise ValueError(f"chain {self.name} is not descending at depth {k}")
            prev = cur


Chain = "LcmChain | TailChain | CustomChain"


# ---------------------------------------------------------------------------
# disjunctive decomposition of targets:  union of (base & primes-part) terms
# ---------------------------------------------------------------------------

#: sign: 0 plain, +1 intersected with the primes, -1 with their complement
Term = tuple[PeriodicSet, int]

_DNF_BUDGET = 64


def _merge_terms(t1: Term, t2: Term) -> Optional[Term]:
    b1, s1 = t1
    b2, s2 = t2
    if s1 and s2 and s1 != s2:
        return None  # P & P^c: empty
    base = b1.intersect(b2)
    return (base, s1 or s2)


def _prune(terms: list[Term]) -> list[Term]:
    out = []
    for base, s in terms:
        if base.is_empty():
            continue
        if s == -1 and base.is_finite() and base.is_subset_of_primes():
            continue  # all-prime finite base & P^c: empty
        if s == 1:
            pr = base.primes_in()
            if pr != "infinite" and not pr:
                continue
        out.append((base, s))
    return out


def dnf_terms(e: SetExpr, budget: int = _DNF_BUDGET) -> Optional[list[Term]]:
    """Decompose e as a finite union of terms (B & primes-part), exactly.

    Returns None when no exact decomposition is found; callers then degrade
    to Unknown.  Quotients distribute through terms via the exact rewrite
    rules for the primes.
    """
    try:
        terms = _dnf(e, budget)
    except ModulusOverflow:
        return None
    return None if terms is None else _prune(terms)


def _dnf(e: SetExpr, budget: int) -> Optional[list[Term]]:
    ps = try_normalize(e)
    if ps is not None:
        return [(ps, 0)]
    if isinstance(e, Primes):
        return [(ALL, 1)]
    if isinstance(e, Union):
        l = _dnf(e.left, budget)
        r = _dnf(e.right, budget)
        if l is None or r is None or len(l) + len(r) > budget:
            return None
        return l + r
    if isinstance(e, Intersect):
        l = _dnf(e.left, budget)
        r = _dnf(e.right, budget)
        if l is None or r is None or len(l) * len(r) > budget:
            return None
        out = []
        for t1 in l:
            for t2 in r:
                m = _merge_terms(t1, t2)
                if m is not None:
                    out.append(m)
        return out
    if isinstance(e, Complement):
        inner = _dnf(e.arg, budget)
        if inner is None:
            return None
        # complement of a union of terms: intersect the term complements,
        # where (B & S)^c = B^c | S^c splits into at most two terms
        out: list[Term] = [(ALL, 0)]
        for base, s in inner:
            parts: list[Term] = [(base.complement(), 0)]
            if s:
                parts.append((ALL, -s))
            merged = []
            for t1 in out:
                for t2 in parts:
                    m = _merge_terms(t1, t2)
                    if m is not None:
                        merged.append(m)
            out = _prune(merged)
            if len(out) > budget:
                return None
        return out
    if isinstance(e, Quotient):
        inner = _dnf(e.arg, budget)
        if inner is None:
            return None
        out = []
        for base, s in inner:
            if s == 0:
                out.append((base.quotient(e.n), 0))
            elif s == 1:
                # (B & P)/n: P/n is P for n=1, {1} for prime n, empty else
                if e.n == 1:
                    out.append((base, 1))
                elif is_prime(e.n):
                    out.append((base.quotient(e.n).intersect(from_finite({1})), 0))
            else:
                # (B & P^c)/n: P^c/n is P^c for n=1, N\{1} for prime n, N else
                if e.n == 1:
                    out.append((base, -1))
                elif is_prime(e.n):
                    out.append((base.quotient(e.n).difference(from_finite({1})), 0))
                else:
                    out.append((base.quotient(e.n), 0))
        return out
    if isinstance(e, Scale):
        if e.n == 1:
            return _dnf(e.arg, budget)
        inner = _dnf(e.arg, budget)
        if inner is None or any(s for _, s in inner):
            return None  # scaled prime-parts are not term-shaped
        return [(base.scale(e.n), 0) for base, _ in inner]
    return None


def split_conjunct(e: SetExpr) -> Optional[Term]:
    """e as a single (base & primes-part) term, if it is one."""
    terms = dnf_terms(e)
    if terms is None:
        return None
    if not terms:
        return (EMPTY, 0)
    if len(terms) == 1:
        return terms[0]
    return None


# ---------------------------------------------------------------------------
# the core of a base
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Core:
    """Conjunctive normal data for the intersection of a base's generators.

    ``base`` and ``extras`` are canonical conjuncts (extras are the ones a
    modulus cap kept out of the main intersection); ``sign`` carries a primes
    or co-primes conjunct; ``opaques`` are membership-only conjuncts.  Chains
    are tracked as flags plus the custom chain list.
    """

    base: PeriodicSet
    extras: tuple[PeriodicSet, ...]
    sign: int
    opaques: tuple[SetExpr, ...]
    lcm_chain: bool
    tail_chain: bool
    customs: tuple[CustomChain, ...]
    conflict: bool = False

    def has_chains(self) -> bool:
        return self.lcm_chain or self.tail_chain or bool(self.customs)

    def is_exact(self) -> bool:
        """The symbolic parts describe the conjunction with nothing dropped."""
        return not self.extras and not self.opaques and not self.conflict

    def member(self, n: int) -> bool:
        """Membership in the depth-free part of the core."""
        if n not in self.base:
            return False
        if any(n not in x for x in self.extras):
            return False
        if self.sign == 1 and not is_prime(n):
            return False
        if self.sign == -1 and is_prime(n):
            return False
        return all(o.member(n) for o in self.opaques)

    def finite_members(self) -> Optional[frozenset[int]]:
        """Exact finite core when the base part is finite (chains are then
        impossible: construction would have failed the intersection check)."""
        if not self.base.is_finite():
            return None
        return frozenset(x for x in self.base.finite_elements() if self.member(x))

    def scan(self, limit: int, depth: int = 1) -> Optional[int]:
        """Least core member found at the given chain depth, scanning to limit."""
        exprs = [c.element(depth) for c in self.customs]
        if self.lcm_chain:
            exprs.append(Multiples(lcm_upto(depth)))
        if self.tail_chain:
            exprs.append(Tail(depth))
        count = 0
        for x in self.base.iter_elements():
            if x > limit or count > limit:
                return None
            count += 1
            if self.member(x) and all(e.member(x) for e in exprs):
                return x
        return None


def _criterion(y: PeriodicSet, sign: int, lcm_chain: bool, tail_chain: bool) -> bool:
    """Is (y & primes-part) eventually emptied by the built-in chains?

    With the lcm chain the surviving elements are the large multiples of
    every modulus, so survival means a full multiple class (and no primes
    survive at all).  With only the tail chain survival means infinitude;
    infinite eventually periodic sets always carry infinitely many
    composites, and carry infinitely many primes exactly when some residue
    class is coprime to the modulus.
    """
    if lcm_chain:
        if sign == 1:
            return True
        return not y.has_full_multiple_class()
    if tail_chain:
        if sign == 1:
            return y.primes_in() != "infinite"
        return y.is_finite()
    if sign == 0:
        return y.is_empty()
    if sign == 1:
        pr = y.primes_in()
        return pr != "infinite" and not pr
    return y.is_subset_of_primes()


def _escalating_depths(limit: int) -> list[int]:
    # dense early (chain elements stay cheap and caps bite soon), sparse late
    depths = list(range(1, min(limit, 64) + 1))
    while depths[-1] < limit:
        depths.append(min(depths[-1] * 2, limit))
    return depths


def ev_empty(core: Core, term: Term, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> bool:
    """True iff core & term is provably eventually empty.

    Exact when the core is exact and has no custom chains; otherwise a True
    answer is still sound (we only ever shrink the set being tested), while
    False means "not proved at this depth".
    """
    t_base, t_sign = term
    if core.conflict:
        return True
    if core.sign and t_sign and core.sign != t_sign:
        return True
    sign = core.sign or t_sign
    try:
        y = core.base.intersect(t_base)
    except ModulusOverflow:
        return False
    if not core.customs:
        if _criterion(y, sign, core.lcm_chain, core.tail_chain):
            return True
        # single extras first (cheap and usually decisive), then a bounded
        # cumulative fold
        for extra in core.extras:
            if math.lcm(y.modulus, extra.modulus) > _CORE_FOLD_BUDGET:
                continue
            if _criterion(y.intersect(extra), sign, core.lcm_chain, core.tail_chain):
                return True
        folded = y
        for extra in core.extras:
            if math.lcm(folded.modulus, extra.modulus) > _CORE_FOLD_BUDGET:
                continue
            folded = folded.intersect(extra)
        if folded is not y and _criterion(folded, sign, core.lcm_chain,
                                          core.tail_chain):
            return True
        return False
    for d in _escalating_depths(depth_limit):
        yd = y
        try:
            for c in core.customs:
                el = c.normalized_element(d)
                if el is not None:
                    yd = yd.intersect(el)
            for extra in core.extras:
                yd = yd.intersect(extra)
        except ModulusOverflow:
            pass
        if _criterion(yd, sign, core.lcm_chain, core.tail_chain):
            return True
    return False


# ---------------------------------------------------------------------------
# FilterBase
# ---------------------------------------------------------------------------


class FipError(ValueError):
    """The generator family provably lacks the finite intersection property."""

    def __init__(self, subfamily: tuple[SetExpr, ...]):
        names = ", ".join(g.render() for g in subfamily)
        super().__init__(f"empty intersection: {{{names}}}")
        self.subfamily = subfamily


class FipUndecidableError(ValueError):
    """Opaque generators prevented both a witness and an emptiness proof."""


def _build_core(generators: Sequence[SetExpr], chains: Sequence) -> Core:
    conjuncts: list[PeriodicSet] = []
    sign = 0
    conflict = False
    opaques: list[SetExpr] = []
    for g in generators:
        for piece in _flatten_intersections(g):
            term = split_conjunct(piece)
            if term is None:
                opaques.append(piece)
                continue
            b, s = term
            if s:
                if sign and sign != s:
                    conflict = True
                sign = sign or s
            if not b.is_all():
                conjuncts.append(b)
    base = ALL
    extras: list[PeriodicSet] = []
    for c in sorted(conjuncts, key=lambda p: p.modulus):
        if math.lcm(base.modulus, c.modulus) > _CORE_FOLD_BUDGET:
            extras.append(c)
            continue
        base = base.intersect(c)
    lcm_chain = any(isinstance(c, LcmChain) for c in chains)
    tail_chain = any(isinstance(c, TailChain) for c in chains)
    customs = tuple(c for c in chains if isinstance(c, CustomChain))
    return Core(base, tuple(extras), sign, tuple(opaques), lcm_chain, tail_chain,
                customs, conflict)


def _flatten_intersections(e: SetExpr) -> Iterable[SetExpr]:
    if isinstance(e, Intersect):
        yield from _flatten_intersections(e.left)
        yield from _flatten_intersections(e.right)
    else:
        yield e


@dataclass(frozen=True)
class FilterBase:
    """Immutable filter base: finite generators plus descending chains.

    The finite intersection property is enforced at construction; bases that
    provably fail it raise :class:`FipError`, and bases whose opaque parts
    prevent any decision raise :class:`FipUndecidableError` unless
    construction is told a witness.
    """

    generators: tuple[SetExpr, ...]
    chains: tuple = ()
    core: Core = field(init=False, compare=False, repr=False)

    def __init__(self, generators: Iterable["SetExpr | PeriodicSet"], chains: Iterable = (),
                 *, check_fip: bool = True, known_witness: Optional[int] = None):
        gens = tuple(as_expr(g) for g in generators)
        chains = tuple(chains)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "chains", chains)
        for c in chains:
            if isinstance(c, CustomChain):
                c.validate()
        object.__setattr__(self, "core", _build_core(gens, chains))
        if check_fip:
            self._enforce_fip(known_witness)

    def _enforce_fip(self, known_witness: Optional[int]) -> None:
        core = self.core
        if known_witness is not None:
            depth = 1
            if core.member(known_witness) and all(
                    ch.element(depth).member(known_witness) for ch in self.chains):
                return
            raise FipError(self.generators)
        if core.conflict or ev_empty(core, (ALL, 0)):
            raise FipError(_minimal_empty_subfamily(self.generators, self.chains))
        if core.is_exact():
            return  # symbolically proven
        if core.scan(DEFAULT_SCAN_BOUND) is not None:
            return
        raise FipUndecidableError(
            "opaque generators: no witness found and no emptiness proof")

    # -- convenience ---------------------------------------------------------

    @cached_property
    def principal_value(self) -> Optional[int]:
        members = self.core.finite_members()
        if members is not None and len(members) == 1:
            return next(iter(members))
        return None

    def is_principal(self) -> bool:
        return self.principal_value is not None

    def with_generator(self, g: "SetExpr | PeriodicSet") -> "FilterBase":
        return FilterBase(self.generators + (as_expr(g),), self.chains)

    def has_chains(self) -> bool:
        return bool(self.chains)

    def render(self) -> str:
        parts = [g.render() for g in self.generators]
        parts += [c.render() for c in self.chains]
        return f"filter({', '.join(parts)})"

    def __repr__(self) -> str:
        return self.render()


@lru_cache(maxsize=65536)
def principal(n: int) -> FilterBase:
    """The base {{n}}: every ultrafilter extending it is the principal one."""
    if n < 1:
        raise ValueError("principal point must be >= 1")
    return FilterBase((FiniteSet({n}),))


# ---------------------------------------------------------------------------
# fip_check (public operation)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FipResult:
    ok: bool
    witness: Optional[int] = None
    empty_subfamily: Optional[tuple[SetExpr, ...]] = None


def _minimal_empty_subfamily(generators: tuple[SetExpr, ...], chains) -> tuple[SetExpr, ...]:
    """Greedy shrink: drop generators while the rest still has empty core."""
    current = list(generators)
    changed = True
    while changed:
        changed = False
        for g in list(current):
            rest = [x for x in current if x is not g]
            core = _build_core(rest, chains)
            if core.conflict or ev_empty(core, (ALL, 0)):
                current = rest
                changed = True
                break
    return tuple(current)


def fip_check(generators: Iterable["SetExpr | PeriodicSet"], chains: Iterable = (),
              scan_bound: int = DEFAULT_SCAN_BOUND) -> FipResult:
    """Finite-intersection-property check.

    On success the witness is a natural in the intersection of all
    generators and the first chain elements; on failure the empty subfamily
    is identified (greedily minimized).
    """
    gens = tuple(as_expr(g) for g in generators)
    chains = tuple(chains)
    core = _build_core(gens, chains)
    if core.conflict or ev_empty(core, (ALL, 0)):
        return FipResult(False, None, _minimal_empty_subfamily(gens, chains))
    witness = core.scan(scan_bound)
    if witness is None:
        if core.is_exact():
            raise AssertionError("nonempty symbolic core without a findable witness")
        raise FipUndecidableError(
            "opaque generators: no witness found and no emptiness proof")
    return FipResult(True, witness, None)


# ---------------------------------------------------------------------------
# entailment
# ---------------------------------------------------------------------------


def entails(p: FilterBase, target: "SetExpr | PeriodicSet", *,
            depth_limit: int = DEFAULT_DEPTH_LIMIT,
            scan_bound: int = DEFAULT_SCAN_BOUND) -> Verdict:
    """Does the target belong to every ultrafilter extending p?

    Entailed iff some finite intersection of generators and chain elements
    is inside the target; Refuted iff one is inside the complement; Unknown
    otherwise.  Exact for exact cores and built-in chains; custom chains are
    explored to depth_limit.
    """
    expr = as_expr(target)
    members = p.core.finite_members()
    if members is not None:
        inside = [x for x in members if expr.member(x)]
        if len(inside) == len(members):
            w = inside[0] if len(inside) == 1 else from_finite(members)
            return entailed(w)
        if not inside:
            w = next(iter(members)) if len(members) == 1 else from_finite(members)
            return refuted(w)
        return unknown()
    neg = dnf_terms(Complement(expr))
    if neg is not None and all(ev_empty(p.core, t, depth_limit) for t in neg):
        return entailed(p.core.base)
    pos = dnf_terms(expr)
    if pos is not None and all(ev_empty(p.core, t, depth_limit) for t in pos):
        return refuted(p.core.base)
    return unknown(scan_bound if (neg is None or pos is None) else depth_limit)


def decides_all_tails(p: FilterBase) -> bool:
    """True iff entails(p, [k, inf)) is Entailed for every k.

    Exact: a base entails every tail exactly when a built-in chain forces
    escape to infinity (finitely generated parts alone never do).
    """
    return p.core.lcm_chain or p.core.tail_chain


# ---------------------------------------------------------------------------
# maps and pushforward
# ---------------------------------------------------------------------------


class MapError(ValueError):
    pass


class MapDescriptor:
    """A function N -> N with enough structure to push filter bases forward."""

    name: str

    def apply(self, n: int) -> int:
        raise NotImplementedError

    def image_expr(self, e: SetExpr) -> SetExpr:
        """Exact image when the rules allow, else a membership-oracle set."""
        raise NotImplementedError


@dataclass(frozen=True)
class AffineMap(MapDescriptor):
    """n -> a*n + b (a >= 0; constant maps allowed, results must stay >= 1)."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.a + self.b < 1:
            raise MapError("affine map must send N into N")

    @property
    def name(self) -> str:
        return f"affine({self.a},{self.b})"

    def apply(self, n: int) -> int:
        return self.a * n + self.b

    def image_expr(self, e: SetExpr) -> SetExpr:
        if self.a == 0:
            return FiniteSet({self.b})
        ps = try_normalize(e)
        if ps is not None:
            if ps.is_empty():
                return FiniteSet(())
            try:
                return Canonical(ps.scale(self.a).shift(self.b))
            except ModulusOverflow:
                pass
        a, b = self.a, self.b
        return setalg.LazySet(
            f"{self.name}[{e.render()}]",
            lambda m: m > b and (m - b) % a == 0 and e.member((m - b) // a))


@dataclass(frozen=True)
class ClassMap(MapDescriptor):
    """Constant on residue classes mod ``modulus``: n -> values[n % modulus]."""

    modulus: int
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != self.modulus:
            raise MapError("need one value per residue class")
        if any(v < 1 for v in self.values):
            raise MapError("values must be naturals")

    @property
    def name(self) -> str:
        return f"classmap(mod {self.modulus})"

    def apply(self, n: int) -> int:
        return self.values[n % self.modulus]

    def class_set(self, r: int) -> PeriodicSet:
        return setalg.periodic(self.modulus, (r,))

    def image_expr(self, e: SetExpr) -> SetExpr:
        values = set()
        for r in range(self.modulus):
            meets = _meets(self.class_set(r), e)
            if meets is None:
                raise MapError(f"{self.name}: cannot decide whether class {r} "
                               f"meets {e.render()}")
            if meets:
                values.add(self.values[r])
        return FiniteSet(values)


@dataclass(frozen=True)
class LazyMap(MapDescriptor):
    """Named map with a pointwise rule and a preimage-set rule.

    Images of infinite sets become membership-oracle primitives: m lies in
    the image of B iff B meets preimage_set(m), decided through the exact
    set machinery.
    """

    map_name: str
    fn: Callable[[int], int] = field(compare=False)
    preimage_set: Callable[[int], SetExpr] = field(compare=False, default=None)

    @property
    def name(self) -> str:
        return self.map_name

    def apply(self, n: int) -> int:
        return self.fn(n)

    def image_expr(self, e: SetExpr) -> SetExpr:
        if self.preimage_set is None:
            raise MapError(f"{self.name}: no image rule and no preimage oracle")
        ps = try_normalize(e)
        if ps is not None and ps.is_finite():
            return FiniteSet({self.fn(x) for x in ps.finite_elements()})
        pre = self.preimage_set
        def member(m: int) -> bool:
            meets = _meets_expr(pre(m), e)
            if meets is None:
                raise MapError(f"{self.name}: membership of {m} undecidable")
            return meets
        return setalg.LazySet(f"{self.name}[{e.render()}]", member)


def _meets(a: PeriodicSet, e: SetExpr) -> Optional[bool]:
    """Does the canonical set a meet e?  None when undecidable."""
    terms = dnf_terms(e)
    if terms is None:
        return None
    for base, s in terms:
        y = a.intersect(base)
        if s == 0:
            if not y.is_empty():
                return True
        elif s == 1:
            pr = y.primes_in()
            if pr == "infinite" or pr:
                return True
        else:
            if not y.is_subset_of_primes():
                return True
    return False


def _meets_expr(a: SetExpr, e: SetExpr) -> Optional[bool]:
    terms = dnf_terms(a)
    if terms is None:
        return None
    hits = []
    for base, s in terms:
        if s == 0:
            hit = _meets(base, e)
        elif s == 1:
            hit = _meets_primes_part(base, e)
        else:
            hit = None
        if hit is None:
            return None
        hits.append(hit)
    return any(hits)


def _meets_primes_part(base: PeriodicSet, e: SetExpr) -> Optional[bool]:
    """Does (base & P) meet e?"""
    terms = dnf_terms(e)
    if terms is None:
        return None
    for b2, s in terms:
        if s == -1:
            continue  # primes never meet the co-primes part
        y = base.intersect(b2)
        pr = y.primes_in()
        if pr == "infinite" or pr:
            return True
    return False


def pushforward(f: MapDescriptor, p: FilterBase) -> FilterBase:
    """Base for the image filter: generator images plus image chains.

    Image bases inherit the finite intersection property from p, so
    construction skips re-verification when the images go opaque.
    """
    gens = [f.image_expr(g) for g in p.generators]
    chains = []
    for ch in p.chains:
        chains.append(CustomChain(f"{f.name}[{ch.render()}]",
                                  lambda k, _c=ch: f.image_expr(_c.element(k))))
    try:
        return FilterBase(gens, chains)
    except FipUndecidableError:
        return FilterBase(gens, chains, check_fip=False)


# ---------------------------------------------------------------------------
# finite Stone duality helper
# ---------------------------------------------------------------------------


def subalgebra_atoms(gens: Sequence[PeriodicSet]) -> list[PeriodicSet]:
    """Nonempty atoms of the Boolean subalgebra generated by gens.

    The atoms partition N; each ultrafilter of the finite subalgebra picks
    exactly one of them.
    """
    gens = list(gens)
    if len(gens) > 16:
        raise ValueError("too many generators for atom enumeration")
    atoms = []
    for signs in itertools.product((True, False), repeat=len(gens)):
        atom = ALL
        for g, keep in zip(gens, signs):
            atom = atom.intersect(g if keep else g.complement())
            if atom.is_empty():
                break
        if not atom.is_empty():
            atoms.append(atom)
    return atoms
