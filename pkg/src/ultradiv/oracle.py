"""Brute-force ground truth on a bounded universe [1, B].

Every symbolic answer in the package can be replayed here by direct
enumeration.  Evaluation returns numpy boolean masks indexed so that
``mask[i]`` is the membership of ``i + 1``; the two layers never share code
paths with the symbolic normalizer beyond the expression types themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import setalg
from .setalg import (AllN, Canonical, Complement, FiniteSet, Intersect, LazySet,
                     Multiples, Primes, Progression, Quotient, Scale, SetExpr,
                     Tail, Union, UpClosure)

DEFAULT_BOUND = 100_000

#: inner evaluations larger than this fall back to pointwise membership
_VECTOR_LIMIT = 50_000_000

_prime_mask_cache: dict[int, np.ndarray] = {}


def _prime_mask(bound: int) -> np.ndarray:
    best = max((b for b in _prime_mask_cache if b >= bound), default=None)
    if best is not None:
        return _prime_mask_cache[best][:bound]
    sieve = np.ones(bound + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(bound ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    mask = sieve[1:]
    if len(_prime_mask_cache) > 8:
        _prime_mask_cache.clear()
    _prime_mask_cache[bound] = mask
    return mask


def _periodic_mask(ps: setalg.PeriodicSet, bound: int) -> np.ndarray:
    mask = np.zeros(bound, dtype=bool)
    for r in ps.residues:
        start = r if r else ps.modulus
        mask[start - 1 :: ps.modulus] = True
    for x in ps.removed:
        if x <= bound:
            mask[x - 1] = False
    for x in ps.added:
        if x <= bound:
            mask[x - 1] = True
    return mask


def _pointwise(e: SetExpr, bound: int) -> np.ndarray:
    return np.fromiter((e.member(k) for k in range(1, bound + 1)), dtype=bool, count=bound)


def eval_bounded(e: SetExpr, bound: int) -> np.ndarray:
    """Exact membership mask of e on [1, bound] by direct enumeration."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if isinstance(e, Canonical):
        return _periodic_mask(e.ps, bound)
    if isinstance(e, AllN):
        return np.ones(bound, dtype=bool)
    if isinstance(e, Multiples):
        # direct slice: chain elements can have moduli far beyond the
        # symbolic cap, which is fine for a bounded mask
        mask = np.zeros(bound, dtype=bool)
        mask[e.n - 1 :: e.n] = True
        return mask
    if isinstance(e, Progression):
        mask = np.zeros(bound, dtype=bool)
        if e.start <= bound:
            mask[e.start - 1 :: e.step] = True
        return mask
    if isinstance(e, FiniteSet):
        mask = np.zeros(bound, dtype=bool)
        for x in e.elements:
            if x <= bound:
                mask[x - 1] = True
        return mask
    if isinstance(e, Primes):
        return _prime_mask(bound)
    if isinstance(e, Tail):
        mask = np.ones(bound, dtype=bool)
        mask[: min(e.k - 1, bound)] = False
        return mask
    if isinstance(e, Complement):
        return ~eval_bounded(e.arg, bound)
    if isinstance(e, Union):
        return eval_bounded(e.left, bound) | eval_bounded(e.right, bound)
    if isinstance(e, Intersect):
        return eval_bounded(e.left, bound) & eval_bounded(e.right, bound)
    if isinstance(e, Quotient):
        inner_bound = bound * e.n
        if inner_bound > _VECTOR_LIMIT:
            return _pointwise(e, bound)
        inner = eval_bounded(e.arg, inner_bound)
        return inner[e.n - 1 :: e.n]
    if isinstance(e, Scale):
        inner = eval_bounded(e.arg, bound // e.n if bound >= e.n else 0) \
            if bound >= e.n else np.zeros(0, dtype=bool)
        mask = np.zeros(bound, dtype=bool)
        if inner.size:
            mask[e.n - 1 :: e.n][: inner.size] = inner
        return mask
    if isinstance(e, UpClosure):
        inner = eval_bounded(e.arg, bound)
        mask = np.zeros(bound, dtype=bool)
        for a in np.nonzero(inner)[0]:
            mask[a::a + 1] = True  # marks a+1, 2(a+1), ... (0-indexed)
        return mask
    if isinstance(e, LazySet):
        return _pointwise(e, bound)
    raise TypeError(f"unknown expression node {type(e).__name__}")


def members_up_to(e: SetExpr, bound: int) -> list[int]:
    return (np.nonzero(eval_bounded(e, bound))[0] + 1).tolist()


@dataclass(frozen=True)
class CheckReport:
    op_name: str
    passed: bool
    bound: int
    detail: str = ""

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"[{status}] {self.op_name} @ bound {self.bound}{extra}"


def cross_check_sets(op_name: str, symbolic: "setalg.PeriodicSet | SetExpr",
                     reference: SetExpr, bound: int = DEFAULT_BOUND) -> CheckReport:
    """Compare a symbolic result against direct enumeration of a reference
    expression on [1, bound]."""
    left = eval_bounded(setalg.as_expr(symbolic), bound)
    right = eval_bounded(reference, bound)
    diff = np.nonzero(left ^ right)[0]
    if diff.size:
        return CheckReport(op_name, False, bound, f"first mismatch at {int(diff[0]) + 1}")
    return CheckReport(op_name, True, bound)


def _depth_schedule(bound: int) -> list[int]:
    depths = list(range(1, 17))
    d = 32
    while d < bound:
        depths.append(d)
        d *= 2
    depths.append(bound)
    return depths


def cross_check_verdict(op_name: str, base, target: SetExpr, verdict,
                        bound: int = DEFAULT_BOUND,
                        depths: Optional[list[int]] = None) -> CheckReport:
    """Soundness replay for a three-valued verdict against a filter base.

    Entailed must exhibit some chain depth whose bounded core sits inside the
    target; Refuted must exhibit one whose bounded core misses it.  Unknown
    is never checked.
    """
    from .filters import Verdict  # local import to avoid a cycle

    assert isinstance(verdict, Verdict)
    if verdict.is_unknown():
        return CheckReport(op_name, True, bound, "unknown (not checked)")
    target_mask = eval_bounded(target, bound)
    if depths is None:
        depths = _depth_schedule(bound)
    candidate_depths = depths if base.chains else range(1, 2)
    for d in candidate_depths:
        core_mask = np.ones(bound, dtype=bool)
        for g in base.generators:
            core_mask &= eval_bounded(g, bound)
        for chain in base.chains:
            core_mask &= eval_bounded(chain.element(d), bound)
        if verdict.is_entailed() and not np.any(core_mask & ~target_mask):
            return CheckReport(op_name, True, bound, f"core depth {d} inside target")
        if verdict.is_refuted() and not np.any(core_mask & target_mask):
            return CheckReport(op_name, True, bound, f"core depth {d} misses target")
    return CheckReport(op_name, False, bound,
                       f"verdict {verdict.outcome.value} not witnessed at any depth")
