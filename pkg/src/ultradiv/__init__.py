"""Symbolic filters, ultrafilter products and divisibility on N.

The package computes with decidable fragments: eventually periodic sets in
canonical form, finite filter bases with descending chains, and three-valued
verdicts (Entailed / Refuted / Unknown) for membership in every ultrafilter
extending a base.  Every symbolic answer can be replayed against the
brute-force bounded oracle in :mod:`ultradiv.oracle`.
"""

from .divisibility import (CompositeFactorError, DivisorPattern,
                           IrreducibilityCertificate, MonotoneMapReport,
                           PatternError, PatternResult, build_divisor_pattern,
                           cfilter_entails, dfilter_entails, divides_nat,
                           identity_map, irreducible_over_P, leftdiv,
                           monotone_map_div, prime_divides_product,
                           quotient_base_reconstruction, spf_reduction_map,
                           squaring_map, widemid)
from .filters import (AffineMap, ClassMap, CustomChain, FilterBase, FipError,
                      FipResult, FipUndecidableError, LazyMap, LcmChain,
                      MapDescriptor, Outcome, TailChain, Verdict, entails,
                      fip_check, principal, pushforward, subalgebra_atoms)
from .oracle import CheckReport, cross_check_sets, cross_check_verdict, eval_bounded
from .product import (ProductQuery, left_mult, product3_member, product_member,
                      verify_factorization)
from .relext import (DIV, GEQ, LEQ, CoherenceError, KernelRelation, Relation,
                     TableRelation, ext_related, image, kernel_coherence,
                     kernel_of_mod, min_witness)
from .setalg import (ALL, EMPTY, AllN, Complement, FiniteSet, Intersect,
                     LazySet, ModulusOverflow, Multiples, NotRepresentableError,
                     PeriodicSet, Primes, Progression, Quotient, Scale, SetExpr,
                     Tail, Union, UpClosure, bset, closure_predicates, member,
                     multiples, normalize, periodic, progression, quotient,
                     quotient_classes, tail, up_closure)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
