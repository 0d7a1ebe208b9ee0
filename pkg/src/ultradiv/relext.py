"""Binary relations on N and their canonical extension to filter bases.

A relation rho on N extends to pairs of filter bases through direct images:
the pair (p, q) is accepted when the image of p's core is entailed by q,
rejected when that image is refuted, and left Unknown otherwise.  On
principal bases this agrees exactly with the underlying relation; on chained
bases the "image of the core" is a depth-indexed family and verdicts are
produced only where stabilization makes them sound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import setalg
from ._numbers import divisors
from .filters import (DEFAULT_DEPTH_LIMIT, DEFAULT_SCAN_BOUND, ClassMap, Core,
                      FilterBase, MapError, Verdict, decides_all_tails,
                      dnf_terms, entailed, entails, ev_empty, from_bool,
                      pushforward, refuted, unknown)
from .setalg import (ALL, EMPTY, Canonical, Complement, FiniteSet, Intersect,
                     ModulusOverflow, NotRepresentableError, PeriodicSet,
                     SetExpr, Tail, as_expr, from_finite, multiples,
                     try_normalize, union_all, up_closure_of)


#: working-modulus ceiling while assembling bracket unions
_BRACKET_BUDGET = 20_000


@dataclass(frozen=True)
class ImageBracket:
    """Image of a core: exact canonical set, or a (lower, upper) sandwich."""

    exact: Optional[PeriodicSet]
    lower: PeriodicSet
    upper: Optional[PeriodicSet]  # None: no useful upper bound (treat as N)

    @staticmethod
    def of(exact: PeriodicSet) -> "ImageBracket":
        return ImageBracket(exact, exact, exact)


def _core_members(core: Core, count: int = 64,
                  value_cap: int = DEFAULT_SCAN_BOUND) -> list[int]:
    out = []
    for x in core.base.iter_elements():
        if x > value_cap or len(out) >= count:
            break
        if core.member(x):
            out.append(x)
    return out


class Relation:
    """Decidable binary relation with optional exact image rules."""

    name: str = "rel"
    reflexive: bool = False
    symmetric: bool = False
    transitive: bool = False

    def holds(self, m: int, n: int) -> Optional[bool]:
        """Truth of (m, n); None only for table relations outside their universe."""
        raise NotImplementedError

    def successors(self, x: int) -> SetExpr:
        """The set {y : (x, y) in rho}, exactly."""
        raise NotImplementedError

    def image_expr(self, a: SetExpr) -> SetExpr:
        """Exact direct image {n : some m in a has (m, n) in rho}; raises
        NotRepresentableError (with bounds when available) otherwise."""
        raise NotImplementedError

    def inverse(self) -> "Relation":
        raise NotImplementedError

    # -- hooks for bases with chains -----------------------------------------

    def image_bracket(self, core: Core) -> ImageBracket:
        """Image of a chain-free core, bracketed when not exact.

        The default brackets through enumeration: successor sets of finitely
        many core members always sit inside the image.
        """
        members = _core_members(core)
        lower = EMPTY
        for x in members:
            s = try_normalize(self.successors(x))
            if s is None:
                continue
            if math.lcm(lower.modulus, s.modulus) > _BRACKET_BUDGET:
                continue
            lower = lower.union(s)
        return ImageBracket(None, lower, None)

    def chained_verdict(self, p: FilterBase, q: FilterBase,
                        depth_limit: int) -> Optional[Verdict]:
        """Relation-specific exact analysis when p carries chains."""
        return None


def image(rho: Relation, a: "SetExpr | PeriodicSet") -> SetExpr:
    """Direct image rho[a]; exact or NotRepresentableError with bounds."""
    return rho.image_expr(as_expr(a))


# ---------------------------------------------------------------------------
# built-in relations
# ---------------------------------------------------------------------------


def _min_member(e: SetExpr, cap: int = DEFAULT_SCAN_BOUND) -> Optional[int]:
    ps = try_normalize(e)
    if ps is not None:
        return None if ps.is_empty() else ps.min_element()
    for k in range(1, cap + 1):
        if e.member(k):
            return k
    return None


class DividesRelation(Relation):
    """(m, n) related iff m divides n; images are upward closures."""

    name = "div"
    reflexive = True
    transitive = True

    def holds(self, m: int, n: int) -> bool:
        return n % m == 0

    def successors(self, x: int) -> SetExpr:
        return setalg.Multiples(x)

    def image_expr(self, a: SetExpr) -> SetExpr:
        return Canonical(setalg.up_closure(a))

    def inverse(self) -> "Relation":
        return DIVISORS

    def image_bracket(self, core: Core) -> ImageBracket:
        if core.is_exact() and core.sign == 0:
            exact, lower, upper = up_closure_of(core.base)
            return ImageBracket(exact, lower, upper)
        members = _core_members(core)
        if not members:
            return ImageBracket(None, EMPTY, None)
        lower = EMPTY
        for x in members:
            if math.lcm(lower.modulus, x) > _BRACKET_BUDGET:
                continue
            lower = lower.union(multiples(x))
        return ImageBracket(None, lower, lower.union(setalg.tail(members[0])))


class DivisorsRelation(Relation):
    """(m, n) related iff n divides m; images are downward closures."""

    name = "div^-1"
    reflexive = True
    transitive = True

    def holds(self, m: int, n: int) -> bool:
        return m % n == 0

    def successors(self, x: int) -> SetExpr:
        return FiniteSet(divisors(x))

    def image_expr(self, a: SetExpr) -> SetExpr:
        ps = try_normalize(a)
        if ps is None:
            raise NotRepresentableError(a)
        # {d : some multiple of d lies in a} is the complement of
        # {d : dN inside a-complement}
        return Canonical(ps.complement().bset().complement())

    def inverse(self) -> "Relation":
        return DIV

    def image_bracket(self, core: Core) -> ImageBracket:
        if core.is_exact() and core.sign == 0:
            return ImageBracket.of(core.base.complement().bset().complement())
        members = _core_members(core)
        lower = from_finite(set().union(*(divisors(x) for x in members))) \
            if members else EMPTY
        upper = core.base.complement().bset().complement().union(from_finite({1}))
        return ImageBracket(None, lower, upper)


class LeqRelation(Relation):
    """(m, n) related iff m <= n; images are tails."""

    name = "leq"
    reflexive = True
    transitive = True

    def holds(self, m: int, n: int) -> bool:
        return m <= n

    def successors(self, x: int) -> SetExpr:
        return Tail(x)

    def image_expr(self, a: SetExpr) -> SetExpr:
        m = _min_member(a)
        if m is None:
            return FiniteSet(())
        return Tail(m)

    def inverse(self) -> "Relation":
        return GEQ

    def image_bracket(self, core: Core) -> ImageBracket:
        members = _core_members(core, count=1)
        if not members:
            return ImageBracket(None, EMPTY, None)
        return ImageBracket.of(setalg.tail(members[0]))

    def chained_verdict(self, p: FilterBase, q: FilterBase,
                        depth_limit: int) -> Optional[Verdict]:
        if not (p.core.lcm_chain or p.core.tail_chain):
            return None  # custom-only chains: no stabilization argument
        # core minima escape to infinity, so the image family is a cofinal
        # family of tails: entailment means q follows every tail
        if decides_all_tails(q):
            return entailed()
        bound = _bounded_core_max(q.core)
        if bound is not None:
            return refuted(bound)
        return unknown(depth_limit)


class GeqRelation(Relation):
    """(m, n) related iff m >= n; images are initial segments."""

    name = "geq"
    reflexive = True
    transitive = True

    def holds(self, m: int, n: int) -> bool:
        return m >= n

    def successors(self, x: int) -> SetExpr:
        return Canonical(from_finite(range(1, x + 1)))

    def image_expr(self, a: SetExpr) -> SetExpr:
        ps = try_normalize(a)
        if ps is None:
            # any unbounded set pulls the image up to all of N
            terms = dnf_terms(a)
            if terms is not None:
                if any(s == 1 and base.primes_in() == "infinite" for base, s in terms) \
                        or any(s == 0 and not base.is_finite() for base, s in terms) \
                        or any(s == -1 and not base.is_finite() for base, s in terms):
                    return Canonical(ALL)
            raise NotRepresentableError(a)
        if ps.is_empty():
            return FiniteSet(())
        if not ps.is_finite():
            return Canonical(ALL)
        return Canonical(from_finite(range(1, max(ps.finite_elements()) + 1)))

    def inverse(self) -> "Relation":
        return LEQ


def _bounded_core_max(core: Core) -> Optional[int]:
    """Largest element when the core is provably bounded (chain-free)."""
    if core.has_chains():
        return None
    base = core.base
    if core.sign == 1:
        pr = base.primes_in()
        if pr == "infinite":
            return None
        return max(pr, default=1)
    if base.is_finite():
        return max(base.finite_elements(), default=1)
    return None


class KernelRelation(Relation):
    """Kernel of a finite-index class map: related iff equal map values."""

    name = "ker"
    reflexive = True
    symmetric = True
    transitive = True

    def __init__(self, h: ClassMap):
        self.h = h
        self.name = f"ker({h.name})"
        # equivalence classes: preimages of the distinct values
        by_value: dict[int, list[int]] = {}
        for r in range(h.modulus):
            by_value.setdefault(h.values[r], []).append(r)
        self.classes: list[PeriodicSet] = [
            setalg.periodic(h.modulus, rs) for _, rs in sorted(by_value.items())
        ]

    def holds(self, m: int, n: int) -> bool:
        return self.h.apply(m) == self.h.apply(n)

    def class_of(self, x: int) -> PeriodicSet:
        for c in self.classes:
            if x in c:
                return c
        raise AssertionError("classes partition N")

    def successors(self, x: int) -> SetExpr:
        return Canonical(self.class_of(x))

    def image_expr(self, a: SetExpr) -> SetExpr:
        out = EMPTY
        for c in self.classes:
            meets = _class_meets(c, a)
            if meets is None:
                raise NotRepresentableError(a)
            if meets:
                out = out.union(c)
        return Canonical(out)

    def inverse(self) -> "Relation":
        return self

    def image_bracket(self, core: Core) -> ImageBracket:
        lower = EMPTY
        upper = EMPTY
        exact = True
        for c in self.classes:
            dead = ev_empty(core, (c, 0))
            if dead:
                continue
            upper = upper.union(c)
            if core.is_exact() and not core.customs:
                lower = lower.union(c)
            else:
                exact = False
        if core.is_exact() and not core.customs and exact:
            return ImageBracket.of(upper)
        # refine the lower bound from witnessed members
        for x in _core_members(core, count=16):
            lower = lower.union(self.class_of(x))
        return ImageBracket(None, lower, upper)

    def chained_verdict(self, p: FilterBase, q: FilterBase,
                        depth_limit: int) -> Optional[Verdict]:
        # classes surviving every depth form the stable image
        stable = EMPTY
        for c in self.classes:
            if not ev_empty(p.core, (c, 0), depth_limit):
                stable = stable.union(c)
        v = entails(q, stable, depth_limit=depth_limit)
        if v.is_entailed() and p.core.is_exact() and not p.core.customs:
            return entailed(stable)
        if v.is_refuted():
            return refuted(stable)  # sound even with an over-approximate stable set
        return None


def _class_meets(c: PeriodicSet, a: SetExpr) -> Optional[bool]:
    terms = dnf_terms(a)
    if terms is None:
        return None
    for base, s in terms:
        y = c.intersect(base)
        if s == 0 and not y.is_empty():
            return True
        if s == 1:
            pr = y.primes_in()
            if pr == "infinite" or pr:
                return True
        if s == -1 and not y.is_subset_of_primes():
            return True
    return False


class TableRelation(Relation):
    """Finite relation given by explicit pairs inside [1, universe]^2.

    Queries with a coordinate beyond the universe are Unknown by policy.
    """

    name = "table"

    def __init__(self, pairs, universe: int, name: str = "table"):
        self.pairs = frozenset(pairs)
        self.universe = universe
        self.name = name
        if any(not (1 <= m <= universe and 1 <= n <= universe) for m, n in self.pairs):
            raise ValueError("table pairs must lie inside the declared universe")
        rng = range(1, universe + 1)
        self.reflexive = all((m, m) in self.pairs for m in rng)
        self.symmetric = all((n, m) in self.pairs for m, n in self.pairs)
        self.transitive = all(
            (m, k) in self.pairs
            for m, n in self.pairs for n2, k in self.pairs if n == n2)

    def holds(self, m: int, n: int) -> Optional[bool]:
        if m > self.universe or n > self.universe:
            return None
        return (m, n) in self.pairs

    def successors(self, x: int) -> SetExpr:
        if x > self.universe:
            raise NotRepresentableError(setalg.LazySet(f"{self.name}[{x}]",
                                                       lambda n: False))
        return FiniteSet({n for m, n in self.pairs if m == x})

    def image_expr(self, a: SetExpr) -> SetExpr:
        ps = try_normalize(a)
        inside = {n for m, n in self.pairs if a.member(m)}
        if ps is not None and ps.is_finite() and \
                all(x <= self.universe for x in ps.finite_elements()):
            return FiniteSet(inside)
        raise NotRepresentableError(a, lower=from_finite(inside), upper=None)

    def inverse(self) -> "Relation":
        return TableRelation({(n, m) for m, n in self.pairs}, self.universe,
                             f"{self.name}^-1")

    def image_bracket(self, core: Core) -> ImageBracket:
        members = _core_members(core, count=self.universe,
                                value_cap=self.universe)
        lower = from_finite({n for m, n in self.pairs if m in set(members)})
        # members beyond the universe have undefined successor rows
        escaped = not ev_empty(core, (setalg.tail(self.universe + 1), 0))
        return ImageBracket(None, lower, None if escaped else lower)


DIV = DividesRelation()
DIVISORS = DivisorsRelation()
LEQ = LeqRelation()
GEQ = GeqRelation()


def kernel_of_mod(k: int) -> KernelRelation:
    """Kernel of the residue map mod k (classes = the k residue classes)."""
    return KernelRelation(ClassMap(k, tuple(((r - 1) % k) + 1 for r in range(k))))


# ---------------------------------------------------------------------------
# the extension judgment
# ---------------------------------------------------------------------------


def ext_related(rho: Relation, p: FilterBase, q: FilterBase, *,
                depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Verdict:
    """Three-valued judgment of the canonical relation extension on bases.

    Entailed: the image of p's core (at every chain depth) is entailed by q.
    Refuted: that image is refuted at some depth.  Principal pairs reduce to
    the raw relation.
    """
    pv, qv = p.principal_value, q.principal_value
    if pv is not None and qv is not None:
        h = rho.holds(pv, qv)
        if h is None:
            return unknown(getattr(rho, "universe", None))
        return from_bool(h, witness=qv)
    if rho.reflexive and p == q:
        # the image of any core contains the core itself
        return entailed()
    if not p.has_chains():
        return _verdict_from_bracket(q, rho.image_bracket(p.core),
                                     depth_limit=depth_limit)
    v = rho.chained_verdict(p, q, depth_limit)
    if v is not None:
        return v
    # sound refutation scan: at any single depth the true core sits inside
    # the computed one, so a refuted upper image refutes the pair
    d = 1
    while d <= depth_limit:
        depth_core = _depth_core(p, d)
        if depth_core is not None:
            bracket = rho.image_bracket(depth_core)
            tgt = bracket.exact if bracket.exact is not None else bracket.upper
            if tgt is not None and entails(q, tgt, depth_limit=depth_limit).is_refuted():
                return refuted(tgt)
        d *= 2
    return unknown(depth_limit)


def _depth_core(p: FilterBase, d: int) -> Optional[Core]:
    """Chain-free core over-approximating p's core at depth d."""
    base = p.core.base
    try:
        for ch in p.chains:
            el = ch.normalized_element(d)
            if el is not None:
                base = base.intersect(el)
    except ModulusOverflow:
        return None
    return Core(base, p.core.extras, p.core.sign, p.core.opaques,
                False, False, (), p.core.conflict)


def _verdict_from_bracket(q: FilterBase, bracket: ImageBracket, *,
                          depth_limit: int) -> Verdict:
    if bracket.exact is not None:
        return entails(q, bracket.exact, depth_limit=depth_limit)
    v = entails(q, bracket.lower, depth_limit=depth_limit)
    if v.is_entailed():
        return entailed(bracket.lower)
    if bracket.upper is not None:
        v = entails(q, bracket.upper, depth_limit=depth_limit)
        if v.is_refuted():
            return refuted(bracket.upper)
    return unknown(depth_limit)


# ---------------------------------------------------------------------------
# witness function and kernel coherence
# ---------------------------------------------------------------------------


def min_witness(rho: Relation, b: "SetExpr | PeriodicSet", x: int,
                scan_bound: int = DEFAULT_SCAN_BOUND) -> tuple[int, str]:
    """Least y in b with (x, y) related, else the least element of b.

    Returns (y, "genuine") or (y, "fallback"); rejects empty b.  The search
    is exact for representable b and bounded otherwise.
    """
    b_expr = as_expr(b)
    b_min = _min_member(b_expr, scan_bound)
    if b_min is None:
        raise ValueError("empty witness pool")
    try:
        succ = rho.successors(x)
    except NotRepresentableError:
        return (b_min, "fallback")
    inter = Intersect(b_expr, succ)
    hit = _min_member(inter, scan_bound)
    if hit is not None:
        return (hit, "genuine")
    # no bounded hit; certify emptiness exactly when the algebra can
    terms = dnf_terms(inter)
    if terms is not None and not terms:
        return (b_min, "fallback")
    if terms is None:
        return (b_min, "fallback")
    # nonempty decomposable intersection without a small member: scan further
    ps = try_normalize(inter)
    if ps is not None and not ps.is_empty():
        return (ps.min_element(), "genuine")
    return (b_min, "fallback")


class CoherenceError(AssertionError):
    """Two provably equal judgments disagreed; indicates an internal bug."""


def kernel_coherence(h: "ClassMap | str", p: FilterBase, q: FilterBase, *,
                     depth_limit: int = DEFAULT_DEPTH_LIMIT,
                     identity_probe_bound: int = 32) -> Verdict:
    """Check that the kernel-relation extension matches pushforward equality.

    One side evaluates the extension of ker h directly; the other compares p
    and q on unions of equivalence classes (finitely many for a class map).
    Entailed/Refuted only when both sides decide and agree; a refutation
    carries a counterexample union in its witness.
    """
    if isinstance(h, str):
        if h != "identity":
            raise MapError(f"unknown kernel map {h!r}")
        return _identity_kernel_coherence(p, q, identity_probe_bound)
    rho = KernelRelation(h)
    pv, qv = p.principal_value, q.principal_value
    if pv is not None and qv is not None:
        # the two sides reduce to map-value equality vs class-set equality
        lhs_b = h.apply(pv) == h.apply(qv)
        rhs_b = rho.class_of(pv) == rho.class_of(qv)
        if lhs_b != rhs_b:
            raise CoherenceError(
                f"kernel sides disagree at principal pair ({pv}, {qv})")
        # pv's class is the witnessing (or separating) union of classes
        return from_bool(lhs_b, witness=rho.class_of(pv))
    lhs = ext_related(rho, p, q, depth_limit=depth_limit)
    if len(rho.classes) > 12:
        raise MapError("class map index too large for union enumeration")
    counterexample: Optional[PeriodicSet] = None
    all_decided = True
    for picks in itertools.product((False, True), repeat=len(rho.classes)):
        u = union_all(c for c, keep in zip(rho.classes, picks) if keep)
        vp = entails(p, u, depth_limit=depth_limit)
        vq = entails(q, u, depth_limit=depth_limit)
        if vp.contradicts(vq):
            counterexample = u
            break
        if not (vp.decided() and vq.decided()):
            all_decided = False
    if counterexample is not None:
        rhs = refuted(counterexample)
    elif all_decided:
        rhs = entailed()
    else:
        rhs = unknown(depth_limit)
    if lhs.decided() and rhs.decided() and lhs.outcome is not rhs.outcome:
        raise CoherenceError(
            f"kernel sides disagree: extension={lhs.outcome.value}, "
            f"class-agreement={rhs.outcome.value}")
    if lhs.is_entailed() and rhs.is_entailed():
        return entailed()
    if lhs.is_refuted() and rhs.is_refuted():
        return refuted(rhs.witness)
    return unknown(depth_limit)


def _identity_kernel_coherence(p: FilterBase, q: FilterBase,
                               probe_bound: int) -> Verdict:
    """Identity kernel (equality relation) with a bounding hint.

    The equivalence classes are singletons, so only principal pairs decide
    positively; contradictions on singleton probes refute.
    """
    pv, qv = p.principal_value, q.principal_value
    if pv is not None and qv is not None:
        return from_bool(pv == qv, witness=from_finite({pv}))
    for n in range(1, probe_bound + 1):
        u = from_finite({n})
        vp = entails(p, u)
        vq = entails(q, u)
        if vp.contradicts(vq):
            return refuted(u)
    return unknown(probe_bound)
