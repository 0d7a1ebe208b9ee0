"""Small integer helpers shared across the package.

Everything here works on naturals starting at 1; 0 is never a member of
any universe set.
"""

from __future__ import annotations

import math
from functools import lru_cache

_SMALL_PRIME_LIMIT = 1 << 20
_small_sieve: bytearray | None = None


def _sieve() -> bytearray:
    global _small_sieve
    if _small_sieve is None:
        sieve = bytearray([1]) * _SMALL_PRIME_LIMIT
        sieve[0] = sieve[1] = 0
        for p in range(2, int(math.isqrt(_SMALL_PRIME_LIMIT)) + 1):
            if sieve[p]:
                sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
        _small_sieve = sieve
    return _small_sieve


def is_prime(n: int) -> bool:
    if n < _SMALL_PRIME_LIMIT:
        return bool(_sieve()[n]) if n >= 0 else False
    # deterministic Miller-Rabin, valid far beyond 64 bits with these bases
    if n % 2 == 0:
        return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def smallest_prime_factor(n: int) -> int:
    """Least prime dividing n; raises for n < 2."""
    if n < 2:
        raise ValueError(f"no prime factor for {n}")
    if n % 2 == 0:
        return 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return f
        f += 2
    return n


def primes_up_to(bound: int) -> list[int]:
    if bound < _SMALL_PRIME_LIMIT:
        sieve = _sieve()
        return [p for p in range(2, bound + 1) if sieve[p]]
    return [p for p in range(2, bound + 1) if is_prime(p)]


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    small, large = [], []
    f = 1
    while f * f <= n:
        if n % f == 0:
            small.append(f)
            if f != n // f:
                large.append(n // f)
        f += 1
    return small + large[::-1]


@lru_cache(maxsize=4096)
def lcm_upto(k: int) -> int:
    """lcm(1, 2, ..., k)."""
    if k <= 1:
        return 1
    return math.lcm(lcm_upto(k - 1), k)
