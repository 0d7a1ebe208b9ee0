"""The extended multiplication at the level of membership verdicts.

A set A belongs to the product of two ultrafilters exactly when the set of
left factors n whose quotient A/n is accepted by the right factor is itself
accepted by the left factor.  On bases the inner acceptance is evaluated
classwise (the quotient map takes finitely many values in our set class),
and undetermined classes degrade the answer to Unknown symmetrically: the
outer test runs on both the optimistic and pessimistic factor sets and only
agreement decides.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import setalg
from ._numbers import is_prime
from .filters import (DEFAULT_DEPTH_LIMIT, DEFAULT_SCAN_BOUND, CustomChain,
                      FilterBase, FipUndecidableError, Verdict, dnf_terms,
                      entailed, entails, from_bool, refuted, unknown)
from .setalg import (ALL, EMPTY, Canonical, Complement, FiniteSet, Intersect,
                     ModulusOverflow, PeriodicSet, Primes, Scale, SetExpr,
                     Union, as_expr, from_finite, member, quotient_classes,
                     try_normalize)


@dataclass(frozen=True)
class ProductQuery:
    """A membership query against a product of two base-approximated points."""

    target: SetExpr
    left: FilterBase
    right: FilterBase


# ---------------------------------------------------------------------------
# classwise quotient decomposition
# ---------------------------------------------------------------------------

_COMPOSITES = Complement(Union(FiniteSet({1}), Primes()))
_CLASS_BUDGET = 256


def _union_exprs(parts: Sequence[SetExpr]) -> SetExpr:
    """Union of conditions, canonical when every part is."""
    if not parts:
        return Canonical(EMPTY)
    canon: Optional[PeriodicSet] = EMPTY
    for e in parts:
        ps = try_normalize(e)
        if ps is None:
            canon = None
            break
        try:
            canon = canon.union(ps)
        except ModulusOverflow:
            canon = None
            break
    if canon is not None:
        return Canonical(canon)
    out = parts[0]
    for e in parts[1:]:
        out = Union(out, e)
    return out


def _term_classes(base: PeriodicSet, sign: int) -> list[tuple[SetExpr, SetExpr]]:
    """(condition, value) classes of the quotient map for one target term."""
    if sign == 0:
        return [(Canonical(c), Canonical(v)) for c, v in quotient_classes(base)]
    if sign == 1:
        # (B & P)/n: B & P at n = 1; {1} when n is a prime in B; empty else
        prime_in = Intersect(Primes(), Canonical(base))
        prime_out = Intersect(Primes(), Canonical(base.complement()))
        one = Canonical(from_finite({1}))
        return [
            (one, Intersect(Canonical(base), Primes())),
            (prime_in, one),
            (prime_out, Canonical(EMPTY)),
            (_COMPOSITES, Canonical(EMPTY)),
        ]
    # (B & P^c)/n: B & P^c at n = 1; B/n minus {1} at primes; B/n at composites
    out: list[tuple[SetExpr, SetExpr]] = [
        (Canonical(from_finite({1})), Intersect(Canonical(base), Complement(Primes())))
    ]
    for c, v in quotient_classes(base):
        cond_p = Intersect(Canonical(c), Primes())
        out.append((cond_p, Canonical(v.difference(from_finite({1})))))
        cond_c = Intersect(Canonical(c), _COMPOSITES)
        out.append((cond_c, Canonical(v)))
    return out


def membership_classes(a: SetExpr) -> Optional[list[tuple[SetExpr, SetExpr]]]:
    """Partition N into conditions with a single quotient value of a each.

    Exact for every target the disjunctive decomposition covers (canonical
    sets and their combinations with the primes); None otherwise.
    """
    terms = dnf_terms(a)
    if terms is None:
        return None
    if not terms:
        return [(Canonical(ALL), Canonical(EMPTY))]
    merged: list[tuple[SetExpr, SetExpr]] = [(Canonical(ALL), Canonical(EMPTY))]
    for base, sign in terms:
        cross: list[tuple[SetExpr, SetExpr]] = []
        for cond1, val1 in merged:
            for cond2, val2 in _term_classes(base, sign):
                cond = _simplify_intersect(cond1, cond2)
                if cond is None:
                    continue
                cross.append((cond, _simplify_union(val1, val2)))
        merged = cross
        if len(merged) > _CLASS_BUDGET:
            return None
    return merged


def _simplify_intersect(a: SetExpr, b: SetExpr) -> Optional[SetExpr]:
    """Intersection, None when provably empty."""
    pa, pb = try_normalize(a), try_normalize(b)
    if pa is not None and pa.is_all():
        return b
    if pb is not None and pb.is_all():
        return a
    if pa is not None and pb is not None:
        try:
            out = pa.intersect(pb)
            return None if out.is_empty() else Canonical(out)
        except ModulusOverflow:
            pass
    e = Intersect(a, b)
    terms = dnf_terms(e)
    if terms is not None and not terms:
        return None
    return e


def _simplify_union(a: SetExpr, b: SetExpr) -> SetExpr:
    pa, pb = try_normalize(a), try_normalize(b)
    if pa is not None and pa.is_empty():
        return b
    if pb is not None and pb.is_empty():
        return a
    if pa is not None and pb is not None:
        try:
            return Canonical(pa.union(pb))
        except ModulusOverflow:
            pass
    return Union(a, b)


# ---------------------------------------------------------------------------
# product membership
# ---------------------------------------------------------------------------


def product_member(a: "SetExpr | PeriodicSet", p: FilterBase, q: FilterBase, *,
                   depth_limit: int = DEFAULT_DEPTH_LIMIT,
                   scan_bound: int = DEFAULT_SCAN_BOUND) -> Verdict:
    """Membership verdict of a in the product of p and q.

    Classes whose inner verdict is Unknown count toward neither side; the
    outer entailment then runs on the pessimistic and optimistic factor sets
    and only agreement decides.
    """
    expr = as_expr(a)
    pv, qv = p.principal_value, q.principal_value
    if pv is not None and qv is not None:
        return from_bool(member(expr, pv * qv), witness=pv * qv)
    classes = membership_classes(expr)
    if classes is None:
        return unknown(scan_bound)
    yes: list[SetExpr] = []
    maybe: list[SetExpr] = []
    for cond, val in classes:
        v = entails(q, val, depth_limit=depth_limit, scan_bound=scan_bound)
        if v.is_entailed():
            yes.append(cond)
        elif v.is_unknown():
            maybe.append(cond)
    t_pessimistic = _union_exprs(yes)
    v = entails(p, t_pessimistic, depth_limit=depth_limit, scan_bound=scan_bound)
    if v.is_entailed():
        return entailed(v.witness)
    t_optimistic = _union_exprs(yes + maybe) if maybe else t_pessimistic
    v = entails(p, t_optimistic, depth_limit=depth_limit, scan_bound=scan_bound)
    if v.is_refuted():
        return refuted(v.witness)
    return unknown(depth_limit)


def left_mult(n: int, q: FilterBase) -> FilterBase:
    """Base for the product of the principal point n with q: scaled
    generators and scaled chains."""
    if n < 1:
        raise ValueError("left factor must be >= 1")
    gens: list[SetExpr] = []
    for g in q.generators:
        ps = try_normalize(g)
        if ps is not None:
            try:
                gens.append(Canonical(ps.scale(n)))
                continue
            except ModulusOverflow:
                pass
        gens.append(Scale(n, g))
    chains = [CustomChain(f"scale({n},{ch.render()})",
                          lambda k, _c=ch, _n=n: Scale(_n, _c.element(k)))
              for ch in q.chains]
    try:
        return FilterBase(gens, chains)
    except FipUndecidableError:
        # the image of a filter base keeps the finite intersection property
        return FilterBase(gens, chains, check_fip=False)


# ---------------------------------------------------------------------------
# triple products and factorization probing
# ---------------------------------------------------------------------------


def product3_member(a: "SetExpr | PeriodicSet", r: FilterBase, p: FilterBase,
                    s: FilterBase, assoc: str = "right", *,
                    depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Verdict:
    """Membership of a in the triple product r * p * s.

    assoc picks the evaluation bracketing: "right" computes r * (p * s),
    "left" computes (r * p) * s; the two agree wherever both decide.
    """
    expr = as_expr(a)
    vals = (r.principal_value, p.principal_value, s.principal_value)
    if all(v is not None for v in vals):
        prod = vals[0] * vals[1] * vals[2]
        return from_bool(member(expr, prod), witness=prod)
    classes = membership_classes(expr)
    if classes is None:
        return unknown(depth_limit)
    if assoc == "right":
        yes, maybe = [], []
        for cond, val in classes:
            v = product_member(val, p, s, depth_limit=depth_limit)
            if v.is_entailed():
                yes.append(cond)
            elif v.is_unknown():
                maybe.append(cond)
        v = entails(r, _union_exprs(yes), depth_limit=depth_limit)
        if v.is_entailed():
            return entailed()
        v = entails(r, _union_exprs(yes + maybe), depth_limit=depth_limit)
        if v.is_refuted():
            return refuted()
        return unknown(depth_limit)
    if assoc != "left":
        raise ValueError("assoc must be 'left' or 'right'")
    yes, maybe = [], []
    for cond, val in classes:
        v = entails(s, val, depth_limit=depth_limit)
        if v.is_entailed():
            yes.append(cond)
        elif v.is_unknown():
            maybe.append(cond)
    v = product_member(_union_exprs(yes), r, p, depth_limit=depth_limit)
    if v.is_entailed():
        return entailed()
    v = product_member(_union_exprs(yes + maybe), r, p, depth_limit=depth_limit)
    if v.is_refuted():
        return refuted()
    return unknown(depth_limit)


def default_probes(q: FilterBase, multiples_bound: int = 32) -> list[SetExpr]:
    probes: list[SetExpr] = list(q.generators)
    probes.extend(setalg.Multiples(n) for n in range(1, multiples_bound + 1))
    probes.append(Primes())
    return probes


def verify_factorization(q: FilterBase, r: FilterBase, p: FilterBase,
                         s: FilterBase, probes: Optional[Sequence[SetExpr]] = None, *,
                         depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Verdict:
    """Consistency of q = r * p * s on a family of probe sets.

    Refuted on the first probe where the two sides contradict (the witness
    carries the probe); Entailed only when every probe decides on both sides
    and agrees (the default probes include q's generators); else Unknown.
    """
    if probes is None:
        probes = default_probes(q)
    all_decided = True
    for a in probes:
        va = entails(q, a, depth_limit=depth_limit)
        vb = product3_member(a, r, p, s, depth_limit=depth_limit)
        if va.contradicts(vb):
            ps = try_normalize(a)
            return refuted(ps if ps is not None else None)
        if not (va.decided() and vb.decided()):
            all_decided = False
    return entailed() if all_decided else unknown(depth_limit)
