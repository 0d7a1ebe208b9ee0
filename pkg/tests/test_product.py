"""Product membership, scaled bases, and factorization probing."""

import pytest

from ultradiv import filters as fl
from ultradiv import product as pr
from ultradiv import setalg as sa
from conftest import random_base, random_expr, random_periodic


def test_principal_product_is_multiplication(rnd):
    for _ in range(300):
        m, n = rnd.randint(1, 200), rnd.randint(1, 200)
        a = random_periodic(rnd)
        v = pr.product_member(a, fl.principal(m), fl.principal(n))
        assert v.decided()
        assert v.is_entailed() == ((m * n) in a)


def test_product_examples():
    # 2N/n is N at even n and 2N at odd n; with both entailed the factor
    # set is everything
    q = fl.FilterBase([sa.Multiples(2)])
    for p in (fl.principal(7), fl.FilterBase([sa.Multiples(5)]),
              fl.FilterBase([], [fl.TailChain()])):
        assert pr.product_member(sa.Multiples(2), p, q).is_entailed()
    # the primes under a principal left factor 2: quotient is {1}, and 3
    # misses it
    v = pr.product_member(sa.Primes(), fl.principal(2), fl.principal(3))
    assert v.is_refuted()


def test_product_primes_nonprincipal():
    odd_primes = fl.FilterBase([sa.Primes(), ~sa.Multiples(2)])
    # 1 * (odd prime) stays prime
    v = pr.product_member(sa.Primes(), fl.principal(1), odd_primes)
    assert v.is_entailed()
    # 4 * prime is never prime
    v = pr.product_member(sa.Primes(), fl.principal(4), odd_primes)
    assert v.is_refuted()
    # scaling the right factor: multiples of 2 entailed after left factor 2
    v = pr.product_member(sa.Multiples(2), fl.principal(2), odd_primes)
    assert v.is_entailed()


def test_product_unknown_propagation():
    # q = {4N} leaves 8N undetermined, and the odd classes of 8N map to 8N
    q = fl.FilterBase([sa.Multiples(4)])
    p = fl.FilterBase([~sa.Multiples(2)])
    v = pr.product_member(sa.Multiples(8), p, q)
    assert v.is_unknown()
    # but a left factor living on the decided classes still resolves
    v = pr.product_member(sa.Multiples(8), fl.principal(8), q)
    assert v.is_entailed()


def test_divisor_absorption(rnd):
    # once q is divisible by n, the multiples of n land in every product
    for n in (2, 3, 5, 12):
        q = fl.FilterBase([sa.Multiples(2 * n)])
        for _ in range(10):
            p = random_base(rnd)
            v = pr.product_member(sa.Multiples(n), p, q)
            assert v.is_entailed(), (n, p.render())


def test_left_mult_examples():
    assert pr.left_mult(3, fl.principal(5)).principal_value == 15
    lm = pr.left_mult(2, fl.FilterBase([sa.Multiples(3)]))
    assert [g.render() for g in lm.generators] == ["6N"]
    from ultradiv._numbers import lcm_upto
    lml = pr.left_mult(2, fl.FilterBase([], [fl.LcmChain()]))
    for k in (1, 4, 8, 11):
        assert fl.entails(lml, sa.multiples(2 * lcm_upto(k))).is_entailed()


def test_left_mult_coherence(rnd):
    # scaled-base verdicts never contradict the product verdicts
    for _ in range(40):
        n = rnd.randint(1, 12)
        q = random_base(rnd, allow_chains=False)
        lm = pr.left_mult(n, q)
        a = random_periodic(rnd)
        v1 = pr.product_member(a, fl.principal(n), q)
        v2 = fl.entails(lm, a)
        assert not v1.contradicts(v2), (n, q.render(), a.render())


def test_left_mult_equals_product_on_principals(rnd):
    for _ in range(100):
        n, m = rnd.randint(1, 40), rnd.randint(1, 40)
        lm = pr.left_mult(n, fl.principal(m))
        assert lm.principal_value == n * m


def test_product3_associativity_on_principals(rnd):
    for _ in range(200):
        m, n, k = rnd.randint(1, 50), rnd.randint(1, 50), rnd.randint(1, 50)
        a = random_periodic(rnd)
        expect = (m * n * k) in a
        for assoc in ("right", "left"):
            v = pr.product3_member(a, fl.principal(m), fl.principal(n),
                                   fl.principal(k), assoc)
            assert v.decided() and v.is_entailed() == expect


def test_product3_mixed_bases_agree(rnd):
    for _ in range(30):
        r = random_base(rnd, allow_chains=False)
        p = fl.principal(rnd.randint(1, 20))
        s = fl.principal(rnd.randint(1, 20))
        a = random_periodic(rnd)
        vr = pr.product3_member(a, r, p, s, "right")
        vl = pr.product3_member(a, r, p, s, "left")
        assert not vr.contradicts(vl)


def test_verify_factorization_examples():
    two, three = fl.principal(2), fl.principal(3)
    assert pr.verify_factorization(fl.principal(12), two, three, two).is_entailed()
    assert pr.verify_factorization(fl.principal(10), two, three, two).is_refuted()
    q = fl.FilterBase([sa.Multiples(4)])
    p = fl.FilterBase([sa.Multiples(2)])
    v = pr.verify_factorization(q, two, p, fl.principal(1))
    assert v.is_unknown()


def test_verify_factorization_random_consistency(rnd):
    for _ in range(25):
        r, p, s = (rnd.randint(1, 15) for _ in range(3))
        good = pr.verify_factorization(fl.principal(r * p * s), fl.principal(r),
                                       fl.principal(p), fl.principal(s))
        assert good.is_entailed()
        bad_q = r * p * s + 1
        bad = pr.verify_factorization(fl.principal(bad_q), fl.principal(r),
                                      fl.principal(p), fl.principal(s))
        assert bad.is_refuted()


def test_product_not_representable_degrades():
    weird = sa.LazySet("sq", lambda n: int(n ** 0.5) ** 2 == n)
    v = pr.product_member(weird, fl.FilterBase([sa.Multiples(2)]),
                          fl.FilterBase([sa.Multiples(3)]))
    assert v.is_unknown() and v.evidence_bound is not None
    # principal points still decide through raw membership
    v = pr.product_member(weird, fl.principal(2), fl.principal(8))
    assert v.is_entailed()
