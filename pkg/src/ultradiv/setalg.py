"""Canonical algebra of decidable subsets of N = {1, 2, 3, ...}.

Two layers live here:

* ``PeriodicSet`` -- the canonical representation of an eventually periodic
  subset of N: a periodic part (residues mod a minimal modulus) patched by
  finitely many added/removed elements.  The class is closed under all the
  operations used elsewhere in the package: boolean operations, the quotient
  A/n = {m : mn in A}, scaling, shifting, and the multiple-kernel
  bset(A) = {n : nN included in A}.

* ``SetExpr`` -- symbolic expression trees over a handful of primitives
  (multiples, progressions, finite sets, tails, the primes) with a total
  membership decision and a normalizer into ``PeriodicSet`` wherever the
  denoted set is eventually periodic.

Sets whose canonical form would need a modulus beyond a configurable cap
raise ``ModulusOverflow``; callers degrade to three-valued Unknown rather
than produce wrong answers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Optional

from ._numbers import divisors, is_prime

#: Largest modulus a canonical form may use.  Beyond this the symbolic layer
#: gives up (ModulusOverflow) and callers fall back to bounded reasoning.
MAX_MODULUS = 1_000_000


class ModulusOverflow(Exception):
    """Canonical form would exceed the modulus cap."""


class NotRepresentableError(Exception):
    """An expression has no eventually periodic canonical form.

    Carries the smallest offending subexpression and, when the failing
    operation can still be bracketed, a (lower, upper) pair of canonical
    sets with lower <= denoted set <= upper.
    """

    def __init__(self, offending: "SetExpr", lower: Optional["PeriodicSet"] = None,
                 upper: Optional["PeriodicSet"] = None):
        super().__init__(f"not eventually periodic: {offending!r}")
        self.offending = offending
        self.lower = lower
        self.upper = upper


# ---------------------------------------------------------------------------
# PeriodicSet
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodicSet:
    """Canonical eventually periodic subset of N.

    The denoted set is ``(({k >= 1 : k mod modulus in residues}) \\ removed)
    | added``.  Instances are only built through :func:`periodic`, which
    guarantees canonicality: the modulus is the minimal eventual period,
    ``added`` is disjoint from the periodic part and ``removed`` is contained
    in it.  Canonical forms are unique per set, so dataclass equality is
    semantic equality.
    """

    modulus: int
    residues: frozenset[int]
    added: frozenset[int] = frozenset()
    removed: frozenset[int] = frozenset()

    # -- membership ---------------------------------------------------------

    def __contains__(self, n: int) -> bool:
        if n < 1:
            return False
        if n in self.added:
            return True
        if n in self.removed:
            return False
        return n % self.modulus in self.residues

    def member(self, n: int) -> bool:
        return n in self

    # -- size / shape -------------------------------------------------------

    def is_empty(self) -> bool:
        return not self.residues and not self.added

    def is_finite(self) -> bool:
        return not self.residues

    def is_all(self) -> bool:
        return len(self.residues) == self.modulus and not self.removed

    def correction_bound(self) -> int:
        """Largest patched element (0 when the set is purely periodic)."""
        return max(itertools.chain(self.added, self.removed), default=0)

    def finite_elements(self) -> frozenset[int]:
        """The set itself, provided it is finite."""
        if self.residues:
            raise ValueError("set is infinite")
        return self.added

    def has_full_multiple_class(self) -> bool:
        """True iff the set contains multiples of every natural number.

        Equivalent to: the canonical residues contain 0, i.e. all large
        multiples of the modulus belong to the set.
        """
        return 0 in self.residues

    def min_element(self) -> int:
        if self.is_empty():
            raise ValueError("empty set has no least element")
        # beyond correction_bound the periodic part is unpatched, so one full
        # period past it must contain an element whenever residues is nonempty
        limit = self.correction_bound() + self.modulus + 1
        for k in range(1, limit + 1):
            if k in self:
                return k
        raise AssertionError("unreachable: nonempty set without members")

    def iter_elements(self) -> Iterator[int]:
        """Ascending members (infinite unless the set is finite)."""
        k = 1
        while True:
            if k in self:
                yield k
            k += 1
            if not self.residues and k > self.correction_bound():
                return

    def elements_up_to(self, bound: int) -> list[int]:
        return [k for k in range(1, bound + 1) if k in self]

    # -- boolean algebra ----------------------------------------------------

    def _combine(self, other: "PeriodicSet", op: Callable[[bool, bool], bool]) -> "PeriodicSet":
        # constant operands keep the result at the other operand's modulus
        for a, b in ((self, other), (other, self)):
            if a.modulus == 1 and not a.added and not a.removed:
                aval = bool(a.residues)
                left_first = a is self
                res = frozenset(
                    r for r in range(b.modulus)
                    if (op(aval, r in b.residues) if left_first
                        else op(r in b.residues, aval)))
                cands = b.added | b.removed
                add = {x for x in cands if (op(aval, x in b) if left_first
                                            else op(x in b, aval))}
                return periodic(b.modulus, res, add, cands - add)
        m = math.lcm(self.modulus, other.modulus)
        if m > MAX_MODULUS:
            raise ModulusOverflow(f"lcm({self.modulus}, {other.modulus}) = {m}")
        res = frozenset(
            r for r in range(m)
            if op(r % self.modulus in self.residues, r % other.modulus in other.residues)
        )
        cands = self.added | self.removed | other.added | other.removed
        add, rem = set(), set()
        for x in cands:
            if op(x in self, x in other):
                add.add(x)
            else:
                rem.add(x)
        return periodic(m, res, add, rem)

    def intersect(self, other: "PeriodicSet") -> "PeriodicSet":
        return self._combine(other, lambda a, b: a and b)

    def union(self, other: "PeriodicSet") -> "PeriodicSet":
        return self._combine(other, lambda a, b: a or b)

    def difference(self, other: "PeriodicSet") -> "PeriodicSet":
        return self._combine(other, lambda a, b: a and not b)

    def complement(self) -> "PeriodicSet":
        res = frozenset(r for r in range(self.modulus) if r not in self.residues)
        return periodic(self.modulus, res, self.removed, self.added)

    def __and__(self, other: "PeriodicSet") -> "PeriodicSet":
        return self.intersect(other)

    def __or__(self, other: "PeriodicSet") -> "PeriodicSet":
        return self.union(other)

    def __sub__(self, other: "PeriodicSet") -> "PeriodicSet":
        return self.difference(other)

    def __invert__(self) -> "PeriodicSet":
        return self.complement()

    def is_subset(self, other: "PeriodicSet") -> bool:
        return self.difference(other).is_empty()

    def is_disjoint(self, other: "PeriodicSet") -> bool:
        return self.intersect(other).is_empty()

    # -- multiplicative structure -------------------------------------------

    def quotient(self, n: int) -> "PeriodicSet":
        """{m : m*n in self}; always eventually periodic."""
        if n < 1:
            raise ValueError("quotient divisor must be >= 1")
        g = math.gcd(n, self.modulus)
        if self.residues == frozenset({0}) and not self.added and not self.removed:
            # multiples of M quotient to multiples of M / gcd directly
            return PeriodicSet(self.modulus // g, frozenset({0}))
        m = self.modulus // g
        res = frozenset(r for r in range(m) if (r * n) % self.modulus in self.residues)
        cands = {x // n for x in self.added | self.removed if x % n == 0}
        add = {x for x in cands if x >= 1 and x * n in self}
        rem = {x for x in cands if x >= 1 and x * n not in self}
        return periodic(m, res, add, rem)

    def scale(self, n: int) -> "PeriodicSet":
        """{n*k : k in self}."""
        if n < 1:
            raise ValueError("scale factor must be >= 1")
        m = n * self.modulus
        if m > MAX_MODULUS:
            raise ModulusOverflow(f"scale modulus {m}")
        if self.residues == frozenset({0}) and not self.added and not self.removed:
            return PeriodicSet(m, frozenset({0}))
        res = frozenset((n * r) % m for r in self.residues)
        cands = {n * x for x in self.added | self.removed}
        add = {x for x in cands if (x // n) in self}
        rem = {x for x in cands if (x // n) not in self}
        return periodic(m, res, add, rem)

    def shift(self, b: int) -> "PeriodicSet":
        """{k + b : k in self} for b >= 0."""
        if b < 0:
            raise ValueError("shift must be >= 0")
        if b == 0:
            return self
        m = self.modulus
        res = frozenset((r + b) % m for r in self.residues)
        # elements <= b of the shifted periodic classes are phantoms
        phantom = {k for k in range(1, b + 1) if k % m in res}
        cands = {x + b for x in self.added | self.removed} | phantom
        add = {x for x in cands if x - b >= 1 and (x - b) in self}
        rem = {x for x in cands if not (x - b >= 1 and (x - b) in self)}
        return periodic(m, res, add, rem)

    def bset(self) -> "PeriodicSet":
        """{n : every multiple of n lies in self}.

        A multiple class nN is eventually inside the periodic part iff all
        multiples of gcd(n, modulus) are residues; the finitely many removed
        elements then rule out exactly their divisors.
        """
        m = self.modulus
        ok: dict[int, bool] = {}
        for d in divisors(m):
            ok[d] = all((k * d) % m in self.residues for k in range(m // d))
        res = frozenset(r for r in range(m) if ok[math.gcd(r, m) if r else m])
        base = periodic(m, res)
        blocked: set[int] = set()
        for x in self.removed:
            blocked.update(divisors(x))
        if blocked:
            base = base.difference(from_finite(blocked))
        return base

    def is_upward_closed(self) -> bool:
        """True iff x in self and x | y imply y in self."""
        return self.is_subset(self.bset())

    # -- primes interaction ---------------------------------------------------

    def primes_in(self) -> "str | frozenset[int]":
        """Intersection with the primes: ``'infinite'`` or the exact finite set.

        A residue class r mod m carries infinitely many primes iff
        gcd(r, m) = 1 (with gcd(0, m) = m); otherwise every element of the
        class is divisible by d = gcd(r, m) > 1, so the class contains at
        most the single prime d, and only when d = r (or d = m for r = 0).
        """
        m = self.modulus
        for r in self.residues:
            if math.gcd(r if r else m, m) == 1:
                return "infinite"
        cands: set[int] = set()
        for r in self.residues:
            if r == 0:
                if is_prime(m):
                    cands.add(m)
            elif math.gcd(r, m) == r and is_prime(r):
                cands.add(r)
        cands -= self.removed
        cands.update(a for a in self.added if is_prime(a))
        return frozenset(cands)

    def is_subset_of_primes(self) -> bool:
        """True iff every member is prime (forces the set to be finite)."""
        if self.residues:
            return False  # infinite classes always contain composites
        return all(is_prime(a) for a in self.added)

    # -- rendering ------------------------------------------------------------

    def render(self) -> str:
        """Parseable text in the CLI set grammar; round-trips to self."""
        if self.is_empty():
            return "{}"
        if self.is_all():
            return "N"
        if not self.residues:
            return "{" + ",".join(str(a) for a in sorted(self.added)) + "}"
        if self.residues == {0} and not self.added and not self.removed:
            return f"{self.modulus}N" if self.modulus > 1 else "N"
        if (self.modulus == 1 and not self.added and self.removed
                and self.removed == frozenset(range(1, max(self.removed) + 1))):
            return f"[{max(self.removed) + 1},inf)"
        parts = []
        for r in sorted(self.residues):
            if r == 0:
                parts.append(f"{self.modulus}N" if self.modulus > 1 else "N")
            else:
                parts.append(f"{r}+{self.modulus}N")
        body = " | ".join(parts)
        if len(parts) > 1:
            body = f"({body})"
        if self.removed:
            rm = ",".join(str(x) for x in sorted(self.removed))
            body = f"({body} & !{{{rm}}})"
        if self.added:
            ad = ",".join(str(x) for x in sorted(self.added))
            body = f"({body} | {{{ad}}})"
        return body

    def __repr__(self) -> str:
        return f"PeriodicSet({self.render()})"


def periodic(modulus: int, residues, added=(), removed=()) -> PeriodicSet:
    """Canonicalizing constructor.

    Accepts any (modulus, residues, added, removed) description -- with the
    convention that ``added`` wins over ``removed`` -- and reduces it to the
    unique canonical form: minimal modulus, then minimal corrections.
    """
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    if modulus > MAX_MODULUS:
        raise ModulusOverflow(str(modulus))
    res = frozenset(r % modulus for r in residues)
    added = frozenset(added)
    removed = frozenset(removed)
    if any(x < 1 for x in added | removed):
        raise ValueError("corrections must be naturals >= 1")

    def raw_member(k: int) -> bool:
        if k in added:
            return True
        if k in removed:
            return False
        return k % modulus in res

    # minimal period of the residue indicator divides the modulus; shifting
    # by d permutes Z_modulus, so invariance reduces to containment
    m = modulus
    if not res:
        m = 1
    elif len(res) == modulus:
        m = 1
    else:
        for d in divisors(modulus)[:-1]:
            if all((r + d) % modulus in res for r in res):
                m = d
                break
    new_res = frozenset(r % m for r in res)
    cands = added | removed
    new_add = frozenset(x for x in cands if raw_member(x) and x % m not in new_res)
    new_rem = frozenset(x for x in cands if not raw_member(x) and x % m in new_res)
    return PeriodicSet(m, new_res, new_add, new_rem)


EMPTY = periodic(1, ())
ALL = periodic(1, (0,))


def from_finite(elements) -> PeriodicSet:
    return periodic(1, (), added=elements)


def multiples(n: int) -> PeriodicSet:
    if n < 1:
        raise ValueError("multiples of n need n >= 1")
    if n > MAX_MODULUS:
        raise ModulusOverflow(str(n))
    # already canonical: the class of 0 has no smaller period
    return PeriodicSet(n, frozenset({0}))


def progression(a: int, step: int) -> PeriodicSet:
    """{a, a + step, a + 2*step, ...} for a, step >= 1."""
    if a < 1 or step < 1:
        raise ValueError("progression needs a, step >= 1")
    below = range(a % step if a % step else step, a, step)
    return periodic(step, (a % step,), removed=below)


def tail(k: int) -> PeriodicSet:
    """[k, inf)."""
    if k < 1:
        raise ValueError("tail start must be >= 1")
    return periodic(1, (0,), removed=range(1, k))


def intersect_all(sets, start: PeriodicSet = ALL) -> PeriodicSet:
    out = start
    for s in sets:
        out = out.intersect(s)
    return out


def union_all(sets, start: PeriodicSet = EMPTY) -> PeriodicSet:
    out = start
    for s in sets:
        out = out.union(s)
    return out


# ---------------------------------------------------------------------------
# SetExpr
# ---------------------------------------------------------------------------


class SetExpr:
    """Symbolic set expression with a total membership decision."""

    def member(self, n: int) -> bool:
        raise NotImplementedError

    def size(self) -> int:
        return 1

    def render(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.render()})"

    def __and__(self, other: "SetExpr") -> "SetExpr":
        return Intersect(self, other)

    def __or__(self, other: "SetExpr") -> "SetExpr":
        return Union(self, other)

    def __invert__(self) -> "SetExpr":
        return Complement(self)


@dataclass(frozen=True, repr=False)
class AllN(SetExpr):
    def member(self, n: int) -> bool:
        return n >= 1

    def render(self) -> str:
        return "N"


@dataclass(frozen=True, repr=False)
class Multiples(SetExpr):
    n: int

    def member(self, k: int) -> bool:
        return k >= 1 and k % self.n == 0

    def render(self) -> str:
        return f"{self.n}N"


@dataclass(frozen=True, repr=False)
class Progression(SetExpr):
    start: int
    step: int

    def member(self, k: int) -> bool:
        return k >= self.start and (k - self.start) % self.step == 0

    def render(self) -> str:
        return progression(self.start, self.step).render()


@dataclass(frozen=True, repr=False)
class FiniteSet(SetExpr):
    elements: frozenset[int]

    def __init__(self, elements):
        object.__setattr__(self, "elements", frozenset(elements))

    def member(self, k: int) -> bool:
        return k in self.elements

    def render(self) -> str:
        return "{" + ",".join(str(a) for a in sorted(self.elements)) + "}"


@dataclass(frozen=True, repr=False)
class Primes(SetExpr):
    def member(self, k: int) -> bool:
        return is_prime(k)

    def render(self) -> str:
        return "P"


@dataclass(frozen=True, repr=False)
class Tail(SetExpr):
    k: int

    def member(self, n: int) -> bool:
        return n >= self.k

    def render(self) -> str:
        return f"[{self.k},inf)"


@dataclass(frozen=True, repr=False)
class Canonical(SetExpr):
    """A canonical set embedded as an expression leaf."""

    ps: PeriodicSet

    def member(self, n: int) -> bool:
        return n in self.ps

    def render(self) -> str:
        return self.ps.render()


@dataclass(frozen=True, repr=False)
class Complement(SetExpr):
    arg: SetExpr

    def member(self, n: int) -> bool:
        return n >= 1 and not self.arg.member(n)

    def size(self) -> int:
        return 1 + self.arg.size()

    def render(self) -> str:
        return f"!({self.arg.render()})"


@dataclass(frozen=True, repr=False)
class Union(SetExpr):
    left: SetExpr
    right: SetExpr

    def member(self, n: int) -> bool:
        return self.left.member(n) or self.right.member(n)

    def size(self) -> int:
        return 1 + self.left.size() + self.right.size()

    def render(self) -> str:
        return f"({self.left.render()} | {self.right.render()})"


@dataclass(frozen=True, repr=False)
class Intersect(SetExpr):
    left: SetExpr
    right: SetExpr

    def member(self, n: int) -> bool:
        return self.left.member(n) and self.right.member(n)

    def size(self) -> int:
        return 1 + self.left.size() + self.right.size()

    def render(self) -> str:
        return f"({self.left.render()} & {self.right.render()})"


@dataclass(frozen=True, repr=False)
class Quotient(SetExpr):
    arg: SetExpr
    n: int

    def member(self, m: int) -> bool:
        return m >= 1 and self.arg.member(m * self.n)

    def size(self) -> int:
        return 1 + self.arg.size()

    def render(self) -> str:
        return f"({self.arg.render()} / {self.n})"


@dataclass(frozen=True, repr=False)
class Scale(SetExpr):
    n: int
    arg: SetExpr

    def member(self, m: int) -> bool:
        return m >= 1 and m % self.n == 0 and self.arg.member(m // self.n)

    def size(self) -> int:
        return 1 + self.arg.size()

    def render(self) -> str:
        return f"({self.n} * {self.arg.render()})"


@dataclass(frozen=True, repr=False)
class UpClosure(SetExpr):
    arg: SetExpr

    def member(self, n: int) -> bool:
        if n < 1:
            return False
        return any(self.arg.member(d) for d in divisors(n))

    def size(self) -> int:
        return 1 + self.arg.size()

    def render(self) -> str:
        return f"up({self.arg.render()})"


@dataclass(frozen=True, repr=False)
class LazySet(SetExpr):
    """Membership-oracle primitive (e.g. the image of a set under a map
    without an exact image rule).  Never normalizable; only usable in
    bounded verdicts."""

    name: str
    fn: Callable[[int], bool] = field(compare=False)

    def member(self, n: int) -> bool:
        return n >= 1 and self.fn(n)

    def render(self) -> str:
        return f"<{self.name}>"


def member(e: SetExpr, n: int) -> bool:
    """Total membership decision for any expression and natural n >= 1."""
    if n < 1:
        raise ValueError("universe starts at 1")
    return e.member(n)


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------


def normalize(e: SetExpr) -> PeriodicSet:
    """Canonical form of e, or NotRepresentableError carrying the smallest
    offending subexpression (and bounds where the failing operation can be
    bracketed)."""
    if isinstance(e, Canonical):
        return e.ps
    if isinstance(e, AllN):
        return ALL
    if isinstance(e, Multiples):
        return multiples(e.n)
    if isinstance(e, Progression):
        return progression(e.start, e.step)
    if isinstance(e, FiniteSet):
        return from_finite(e.elements)
    if isinstance(e, Tail):
        return tail(e.k)
    if isinstance(e, Primes):
        raise NotRepresentableError(e)
    if isinstance(e, LazySet):
        raise NotRepresentableError(e)
    if isinstance(e, Complement):
        return normalize(e.arg).complement()
    if isinstance(e, Union):
        return normalize(e.left).union(normalize(e.right))
    if isinstance(e, Intersect):
        return normalize(e.left).intersect(normalize(e.right))
    if isinstance(e, Quotient):
        if isinstance(e.arg, Primes):
            # exact rewrite rules for the primes under quotient
            if e.n == 1:
                raise NotRepresentableError(e.arg)
            return from_finite({1}) if is_prime(e.n) else EMPTY
        return normalize(e.arg).quotient(e.n)
    if isinstance(e, Scale):
        return normalize(e.arg).scale(e.n)
    if isinstance(e, UpClosure):
        if isinstance(e.arg, Primes):
            return tail(2)  # every n >= 2 has a prime divisor
        inner = normalize(e.arg)
        exact, lower, upper = up_closure_of(inner)
        if exact is not None:
            return exact
        raise NotRepresentableError(e, lower, upper)
    raise TypeError(f"unknown expression node {type(e).__name__}")


def try_normalize(e: SetExpr) -> Optional[PeriodicSet]:
    try:
        return normalize(e)
    except NotRepresentableError:
        return None


def as_expr(s: "PeriodicSet | SetExpr") -> SetExpr:
    return Canonical(s) if isinstance(s, PeriodicSet) else s


def as_canonical(s: "PeriodicSet | SetExpr") -> PeriodicSet:
    return s if isinstance(s, PeriodicSet) else normalize(s)


# ---------------------------------------------------------------------------
# spec operations
# ---------------------------------------------------------------------------


def quotient(a: "PeriodicSet | SetExpr", n: int) -> PeriodicSet:
    """A/n = {m : mn in A}."""
    return as_canonical(a).quotient(n)


def quotient_classes(a: "PeriodicSet | SetExpr") -> list[tuple[PeriodicSet, PeriodicSet]]:
    """Finite list of (condition, value) pairs with the conditions
    partitioning N and quotient(a, n) = value for every n in a condition.

    For n beyond every patched element, A/n depends only on n mod modulus;
    the finitely many small n get singleton conditions.
    """
    return list(_quotient_classes_cached(as_canonical(a)))


@lru_cache(maxsize=8192)
def _quotient_classes_cached(a: PeriodicSet) -> tuple[tuple[PeriodicSet, PeriodicSet], ...]:
    m = a.modulus
    cutoff = a.correction_bound()
    groups: dict[PeriodicSet, PeriodicSet] = {}

    def add(cond: PeriodicSet, value: PeriodicSet) -> None:
        if cond.is_empty():
            return
        groups[value] = groups[value].union(cond) if value in groups else cond

    for n in range(1, cutoff + 1):
        add(from_finite({n}), a.quotient(n))
    small = from_finite(range(1, cutoff + 1)) if cutoff else EMPTY
    for r in range(m):
        rep = r if r else m
        while rep <= cutoff:
            rep += m
        cond = periodic(m, (r,)).difference(small)
        add(cond, a.quotient(rep))
    pairs = [(cond, value) for value, cond in groups.items()]
    pairs.sort(key=lambda cv: (cv[0].modulus, sorted(cv[0].residues),
                               sorted(cv[0].added), sorted(cv[0].removed)))
    return tuple(pairs)


def up_closure_of(a: PeriodicSet, bracket_budget: int = 20_000,
                  ) -> tuple[Optional[PeriodicSet], PeriodicSet, PeriodicSet]:
    """Core of up_closure: returns (exact_or_None, lower, upper).

    up(A) = union of aN over a in A.  Elements a with aN inside A form
    A & bset(A), which is itself upward closed; whatever is left over is
    handled exactly when finite, otherwise bracketed.  Brackets stay cheap:
    multiples of leftovers are folded in only while the working modulus is
    small.
    """
    if 1 in a:
        return ALL, ALL, ALL
    closed = a.intersect(a.bset())
    rest = a.difference(closed)
    if rest.is_finite():
        out = closed
        overflow = False
        for x in sorted(rest.finite_elements()):
            if math.lcm(out.modulus, x) > MAX_MODULUS:
                overflow = True
                break
            out = out.union(multiples(x))
        if not overflow:
            return out, out, out
    # bracket: everything in A is in up(A); multiples of small leftovers are
    # cheap to add; anything else is a proper multiple of a leftover element
    lower = closed.union(a)
    uncovered = rest
    for x in itertools.islice(rest.iter_elements(), 16):
        if math.lcm(lower.modulus, x) > bracket_budget:
            continue
        lower = lower.union(multiples(x))
        uncovered = uncovered.difference(multiples(x))
    if uncovered.is_empty():
        return lower, lower, lower
    upper = lower.union(tail(2 * uncovered.min_element()))
    return None, lower, upper


def up_closure(a: "PeriodicSet | SetExpr") -> PeriodicSet:
    """Upward closure under divisibility: {m : some a in A divides m}.

    Exact whenever possible (always for finite sets, sets containing 1, and
    upward closed sets); raises NotRepresentableError with bounds attached
    otherwise.
    """
    e = as_expr(a)
    return normalize(e if isinstance(e, UpClosure) else UpClosure(e))


def bset(a: "PeriodicSet | SetExpr") -> PeriodicSet:
    """{n : nN is contained in A}."""
    return as_canonical(a).bset()


@dataclass(frozen=True)
class ClosureReport:
    """Result of checking divisor-closure and lcm-closure on a fragment."""

    passed: bool
    bound: int
    kind: Optional[str] = None          # "divisor" | "lcm"
    witness: Optional[tuple[int, ...]] = None

    def describe(self) -> str:
        if self.passed:
            return f"closed on [1,{self.bound}]"
        if self.kind == "divisor":
            n, d = self.witness
            return f"fail: {d} divides {n} but {d} is missing"
        a, b, l = self.witness
        return f"fail: lcm({a},{b}) = {l} is missing"


def closure_predicates(a: "PeriodicSet | SetExpr", k: int) -> ClosureReport:
    """Check A's fragment on [1, k]: downward closure under divisibility and
    closure under lcm (for pairs whose lcm stays <= k).  Reports the first
    violation in ascending order."""
    if k < 1:
        raise ValueError("bound must be >= 1")
    e = as_expr(a)
    members = [n for n in range(1, k + 1) if e.member(n)]
    have = set(members)
    for n in members:
        for d in divisors(n):
            if d not in have:
                return ClosureReport(False, k, "divisor", (n, d))
    for i, x in enumerate(members):
        for y in members[i:]:
            l = math.lcm(x, y)
            if l <= k and l not in have:
                return ClosureReport(False, k, "lcm", (x, y, l))
    return ClosureReport(True, k)
