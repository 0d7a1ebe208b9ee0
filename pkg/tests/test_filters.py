"""Filter bases: FIP, three-valued entailment, pushforwards, atoms."""

import pytest

from ultradiv import filters as fl
from ultradiv import oracle as orc
from ultradiv import setalg as sa
from conftest import battery_sets, random_base, random_periodic


# ---------------------------------------------------------------------------
# fip_check
# ---------------------------------------------------------------------------


def test_fip_examples():
    res = fl.fip_check([sa.Multiples(2), sa.Multiples(3),
                        ~sa.Multiples(4), ~sa.Multiples(5)])
    assert res.ok and res.witness == 6

    res = fl.fip_check([sa.Multiples(2), ~sa.Multiples(2)])
    assert not res.ok
    assert {g.render() for g in res.empty_subfamily} == {"2N", "!(2N)"}

    res = fl.fip_check([sa.Primes(), ~sa.Multiples(2)])
    assert res.ok and res.witness == 3


def test_fip_witness_in_every_generator(rnd):
    for _ in range(60):
        base = random_base(rnd)
        res = fl.fip_check(base.generators, base.chains)
        assert res.ok
        for g in base.generators:
            assert g.member(res.witness)
        for ch in base.chains:
            assert ch.element(1).member(res.witness)


def test_fip_true_implies_every_subfamily_nonempty(rnd):
    import itertools
    for _ in range(25):
        base = random_base(rnd, allow_chains=False)
        res = fl.fip_check(base.generators)
        assert res.ok
        gens = [sa.try_normalize(g) for g in base.generators]
        for r in range(1, len(gens) + 1):
            for combo in itertools.combinations(gens, r):
                inter = sa.intersect_all(combo)
                assert not inter.is_empty()


def test_fip_minimal_subfamily():
    res = fl.fip_check([sa.Multiples(6), sa.Multiples(10),
                        sa.Multiples(4), ~sa.Multiples(2)])
    assert not res.ok
    # greedy minimization drops the irrelevant generators
    renders = {g.render() for g in res.empty_subfamily}
    assert "!(2N)" in renders and len(renders) == 2


def test_fip_chain_incompatibility():
    # the primes cannot keep meeting every deep multiple class
    with pytest.raises(fl.FipError):
        fl.FilterBase([sa.Primes()], [fl.LcmChain()])
    # finite sets die against the tail chain
    with pytest.raises(fl.FipError):
        fl.FilterBase([sa.FiniteSet({5, 9})], [fl.TailChain()])
    # but infinite sets survive it
    fl.FilterBase([sa.Multiples(9)], [fl.TailChain()])


# ---------------------------------------------------------------------------
# entails
# ---------------------------------------------------------------------------


def test_entails_examples():
    assert fl.entails(fl.FilterBase([sa.Multiples(6)]), sa.Multiples(3)).is_entailed()
    assert fl.entails(fl.FilterBase([sa.Multiples(4)]), sa.Multiples(3)).is_unknown()
    lcm = fl.FilterBase([], [fl.LcmChain()])
    for k in range(1, 1001):
        assert fl.entails(lcm, sa.Multiples(k)).is_entailed()


def test_principal_decides_everything(rnd):
    from conftest import random_expr
    for _ in range(200):
        n = rnd.randint(1, 60)
        e = random_expr(rnd, depth=3, allow_primes=True)
        v = fl.entails(fl.principal(n), e)
        assert v.decided()
        assert v.is_entailed() == e.member(n)


def test_entails_soundness_vs_oracle(rnd):
    for _ in range(120):
        base = random_base(rnd)
        target = random_periodic(rnd)
        v = fl.entails(base, target)
        rep = orc.cross_check_verdict("entails", base, sa.Canonical(target), v,
                                      bound=50_000)
        assert rep.passed, (base.render(), target.render(), rep.line())


def test_entails_never_both(rnd):
    # mutual exclusion: re-querying the complement flips the verdict
    for _ in range(100):
        base = random_base(rnd)
        target = random_periodic(rnd)
        v = fl.entails(base, target)
        w = fl.entails(base, target.complement())
        if v.is_entailed():
            assert w.is_refuted()
        if v.is_refuted():
            assert w.is_entailed()


def test_entails_monotone_in_generators(rnd):
    for _ in range(80):
        base = random_base(rnd, allow_chains=False)
        target = random_periodic(rnd)
        v = fl.entails(base, target)
        extra = sa.Canonical(sa.try_normalize(base.generators[0]).union(
            random_periodic(rnd)))
        try:
            bigger = base.with_generator(extra)
        except (fl.FipError, fl.FipUndecidableError):
            continue
        w = fl.entails(bigger, target)
        assert not v.contradicts(w)


def test_entails_with_tail_chain():
    tailb = fl.FilterBase([sa.Multiples(3)], [fl.TailChain()])
    assert fl.entails(tailb, sa.Tail(1000)).is_entailed()
    assert fl.entails(tailb, sa.multiples(3) - sa.from_finite({3, 6})).is_entailed()
    assert fl.entails(tailb, sa.FiniteSet(range(1, 500))).is_refuted()
    assert fl.entails(tailb, sa.Multiples(6)).is_unknown()


def test_entails_primes_targets():
    assert fl.entails(fl.FilterBase([sa.Primes()]), sa.Primes()).is_entailed()
    assert fl.entails(fl.FilterBase([sa.Multiples(4)]), sa.Primes()).is_refuted()
    assert fl.entails(fl.FilterBase([sa.Multiples(2)]), sa.Primes()).is_unknown()
    odd_primes = fl.FilterBase([sa.Primes(), ~sa.Multiples(2)])
    assert fl.entails(odd_primes, sa.Multiples(2)).is_refuted()
    assert fl.entails(odd_primes, ~sa.Multiples(2)).is_entailed()
    # the tail chain keeps only the infinitude of the class
    ptail = fl.FilterBase([sa.Primes()], [fl.TailChain()])
    assert fl.entails(ptail, sa.Primes()).is_entailed()
    assert fl.entails(ptail, sa.periodic(4, (1, 3))).is_entailed()
    assert fl.entails(ptail, sa.FiniteSet({2, 3, 5})).is_refuted()


def test_entails_finite_core_mixed_is_unknown():
    base = fl.FilterBase([sa.FiniteSet({4, 9})])
    assert fl.entails(base, sa.Multiples(2)).is_unknown()
    assert fl.entails(base, sa.Tail(2)).is_entailed()
    assert fl.entails(base, sa.Multiples(5)).is_refuted()


# ---------------------------------------------------------------------------
# pushforward
# ---------------------------------------------------------------------------


def test_pushforward_affine_examples():
    doubled = fl.pushforward(fl.AffineMap(2, 0), fl.principal(3))
    assert doubled.principal_value == 6
    shifted = fl.pushforward(fl.AffineMap(1, 5), fl.FilterBase([sa.Multiples(3)]))
    v = fl.entails(shifted, sa.Canonical(sa.multiples(3).shift(5)))
    assert v.is_entailed()


def test_pushforward_squaring_principal():
    from ultradiv.divisibility import squaring_map
    sq = fl.pushforward(squaring_map(), fl.principal(3))
    assert sq.principal_value == 9


def test_pushforward_class_map():
    cm = fl.ClassMap(3, (3, 1, 2))  # n -> ((n - 1) mod 3) + 1
    pushed = fl.pushforward(cm, fl.FilterBase([sa.Progression(1, 3)]))
    assert pushed.principal_value == 1


def test_pushforward_lazy_infinite_images():
    from ultradiv.divisibility import squaring_map
    base = fl.FilterBase([sa.Multiples(3)])
    pushed = fl.pushforward(squaring_map(), base)
    # membership-oracle generators: verdicts are sound, often Unknown
    (gen,) = pushed.generators
    assert gen.member(9) and gen.member(36) and not gen.member(18)
    v = fl.entails(pushed, sa.Multiples(3))
    assert not v.is_refuted()


def test_class_map_requires_one_value_per_class():
    with pytest.raises(fl.MapError):
        fl.ClassMap(3, (1, 2))


def test_lazy_map_without_preimage_rule_rejected():
    bad = fl.LazyMap("opaque", lambda n: n + 1, None)
    with pytest.raises(fl.MapError):
        fl.pushforward(bad, fl.FilterBase([sa.Multiples(2)]))


# ---------------------------------------------------------------------------
# subalgebra atoms
# ---------------------------------------------------------------------------


def test_atoms_examples():
    atoms = fl.subalgebra_atoms([sa.multiples(2)])
    assert set(atoms) == {sa.multiples(2), sa.periodic(2, (1,))}
    atoms = fl.subalgebra_atoms([sa.multiples(2), sa.multiples(3)])
    assert len(atoms) == 4
    atoms = fl.subalgebra_atoms([sa.multiples(2), sa.multiples(4)])
    assert len(atoms) == 3  # the cell 4N \ 2N is empty


def test_atoms_partition(rnd):
    for _ in range(40):
        gens = [random_periodic(rnd, max_modulus=8, correction_span=12)
                for _ in range(rnd.randint(1, 4))]
        atoms = fl.subalgebra_atoms(gens)
        union = sa.EMPTY
        for a in atoms:
            assert not a.is_empty()
            assert union.is_disjoint(a)
            union = union | a
        assert union == sa.ALL
        # disjoint cover replayed pointwise on a window
        seen = [0] * 2001
        for a in atoms:
            for k in a.elements_up_to(2000):
                seen[k] += 1
        assert all(c == 1 for c in seen[1:])


def test_atoms_refine_generators(rnd):
    for _ in range(20):
        gens = [random_periodic(rnd, max_modulus=6) for _ in range(3)]
        atoms = fl.subalgebra_atoms(gens)
        for a in atoms:
            for g in gens:
                assert a.is_subset(g) or a.is_disjoint(g)
