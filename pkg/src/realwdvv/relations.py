"""Instantiation of the three recursion shapes as exact linear-algebra rows.

Each instance is one equation lhs_coeff * N(B,l) = sum of monomials, where a
monomial is an exact rational coefficient times at most two real-invariant
unknowns.  All binomials, powers of two, pairings, and complex invariants are
folded into the coefficients at build time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .complex_gw import complex_invariant
from .errors import GateViolation
from .lattice import (
    CurveClass,
    admissible_classes,
    bracket_indicator,
    c1_degree,
    decompositions,
    doubling,
    ell_omega,
    halve,
    intersect,
    is_admissible,
    pair,
    real_dim_k,
)

KINDS = ("R1", "R2", "R3")


def binom(n, k):
    """Binomial coefficient, zero outside 0 <= k <= n (negative n included)."""
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


@dataclass(frozen=True)
class RealKey:
    B: CurveClass
    l: int

    def __str__(self):
        return "N[%s,%d]" % (self.B, self.l)


def is_live(model, key):
    return is_admissible(model, key.B) and real_dim_k(model, key.B, key.l) >= 0


@dataclass(frozen=True)
class Monomial:
    coeff: Fraction
    factors: tuple  # 0, 1, or 2 RealKeys


@dataclass(frozen=True)
class RelationInstance:
    kind: str
    lhs_key: RealKey
    lhs_coeff: int
    triple: tuple
    monomials: tuple

    def __str__(self):
        return "%s at %s (%d monomials)" % (
            self.kind,
            self.lhs_key,
            len(self.monomials),
        )


def _instance_gate(kind, model, B, l, triple):
    lw = ell_omega(model, B)
    if kind == "R1":
        if not (l >= 1 and lw - 2 * l >= 1):
            raise GateViolation("R1 needs l >= 1 and k >= 1 at %s, l=%d" % (B, l))
    elif kind == "R2":
        if not l >= 2:
            raise GateViolation("R2 needs l >= 2 at %s, l=%d" % (B, l))
    elif kind == "R3":
        if not l >= 1:
            raise GateViolation("R3 needs l >= 1 at %s, l=%d" % (B, l))
        if len(triple) < 3:
            raise GateViolation("R3 needs a triple with a third divisor")
    else:
        raise GateViolation("unknown relation kind %r" % (kind,))


def _doubled_pairs(model, B):
    """(B0, Bp) with B0 + doubling(Bp) = B, both nonzero admissible."""
    total = c1_degree(model, B)
    for t in range(1, (total - 1) // 2 + 1):
        for Bp in admissible_classes(model, t):
            B0 = B - doubling(model, Bp)
            if not B0.is_zero and is_admissible(model, B0):
                yield B0, Bp


def instantiate(kind, model, B, l, triple, complex_provider):
    """Build one equation of the requested kind at (B, l)."""
    _instance_gate(kind, model, B, l, triple)
    H1, H2 = triple[0], triple[1]
    H3 = triple[2] if len(triple) > 2 else None
    lw = ell_omega(model, B)
    k = lw - 2 * l
    monomials = []

    def factor_live(key):
        return real_dim_k(model, key.B, key.l) >= 0 and key.l >= 0

    if kind == "R1":
        # constant from classes that halve onto B
        scalar = (
            -(Fraction(2) ** (l - 3))
            * bracket_indicator(model, B, l)
            * pair(model, H1, B)
            * pair(model, H2, B)
        )
        if scalar != 0:
            Bhalf = halve(model, B)
            if Bhalf is not None:
                value = complex_invariant(complex_provider, model, Bhalf)
                if value:
                    monomials.append(Monomial(scalar * value, ()))
        for B0, Bp in _doubled_pairs(model, B):
            lwp = ell_omega(model, Bp)
            coeff = (
                -(Fraction(2) ** lwp)
                * intersect(model, B0, Bp)
                * pair(model, H1, Bp)
                * pair(model, H2, Bp)
                * binom(l - 1, lwp)
            )
            if coeff == 0:
                continue
            key = RealKey(B0, l - 1 - lwp)
            if not factor_live(key):
                continue
            value = complex_invariant(complex_provider, model, Bp)
            if value:
                monomials.append(Monomial(coeff * value, (key,)))
        for B1, B2 in decompositions(model, B):
            lw1 = ell_omega(model, B1)
            h1b1 = pair(model, H1, B1)
            if h1b1 == 0:
                continue
            for l1 in range(0, l):
                l2 = l - 1 - l1
                coeff = (
                    Fraction(h1b1)
                    * binom(l - 1, l1)
                    * (
                        pair(model, H2, B2) * binom(k - 1, lw1 - 2 * l1 - 1)
                        - pair(model, H2, B1) * binom(k - 1, lw1 - 2 * l1)
                    )
                )
                if coeff == 0:
                    continue
                k1, k2 = RealKey(B1, l1), RealKey(B2, l2)
                if factor_live(k1) and factor_live(k2):
                    monomials.append(Monomial(coeff, (k1, k2)))
        lhs_coeff = 1

    elif kind == "R2":
        for B0, Bp in _doubled_pairs(model, B):
            lwp = ell_omega(model, Bp)
            coeff = (
                Fraction(2) ** (lwp - 1)
                * intersect(model, B0, Bp)
                * pair(model, H1, Bp)
                * (
                    pair(model, H2, B0) * binom(l - 2, lwp - 1)
                    - 2 * pair(model, H2, Bp) * binom(l - 2, lwp)
                )
            )
            if coeff == 0:
                continue
            key = RealKey(B0, l - 1 - lwp)
            if not factor_live(key):
                continue
            value = complex_invariant(complex_provider, model, Bp)
            if value:
                monomials.append(Monomial(coeff * value, (key,)))
        for B1, B2 in decompositions(model, B):
            lw1 = ell_omega(model, B1)
            h2b1 = pair(model, H2, B1)
            if h2b1 == 0:
                continue
            for l1 in range(0, l - 1):
                l2 = l - 2 - l1
                coeff = (
                    Fraction(h2b1)
                    * binom(l - 2, l1)
                    * (
                        pair(model, H1, B2) * binom(k, lw1 - 2 * l1 - 1)
                        - pair(model, H1, B1) * binom(k, lw1 - 2 * l1)
                    )
                )
                if coeff == 0:
                    continue
                k1, k2 = RealKey(B1, l1), RealKey(B2, l2 + 1)
                if factor_live(k1) and factor_live(k2):
                    monomials.append(Monomial(coeff, (k1, k2)))
        lhs_coeff = 1

    else:
        for B0, Bp in _doubled_pairs(model, B):
            lwp = ell_omega(model, Bp)
            coeff = (
                Fraction(2) ** lwp
                * intersect(model, B0, Bp)
                * pair(model, H1, Bp)
                * binom(l - 1, lwp)
                * (
                    pair(model, H2, B0) * pair(model, H3, Bp)
                    - pair(model, H3, B0) * pair(model, H2, Bp)
                )
            )
            if coeff == 0:
                continue
            key = RealKey(B0, l - 1 - lwp)
            if not factor_live(key):
                continue
            value = complex_invariant(complex_provider, model, Bp)
            if value:
                monomials.append(Monomial(coeff * value, (key,)))
        for B1, B2 in decompositions(model, B):
            lw1 = ell_omega(model, B1)
            h1b1 = pair(model, H1, B1)
            if h1b1 == 0:
                continue
            antisym = pair(model, H3, B1) * pair(model, H2, B2) - pair(
                model, H2, B1
            ) * pair(model, H3, B2)
            if antisym == 0:
                continue
            for l1 in range(0, l):
                l2 = l - 1 - l1
                coeff = (
                    Fraction(h1b1)
                    * antisym
                    * binom(l - 1, l1)
                    * binom(k, lw1 - 2 * l1)
                )
                if coeff == 0:
                    continue
                k1, k2 = RealKey(B1, l1), RealKey(B2, l2)
                if factor_live(k1) and factor_live(k2):
                    monomials.append(Monomial(coeff, (k1, k2)))
        lhs_coeff = pair(model, H3, B)

    lhs_degree = c1_degree(model, B)
    for mono in monomials:
        for key in mono.factors:
            assert c1_degree(model, key.B) < lhs_degree
    return RelationInstance(
        kind=kind,
        lhs_key=RealKey(B, l),
        lhs_coeff=lhs_coeff,
        triple=triple,
        monomials=tuple(monomials),
    )


def applicable_l_range(kind, model, B):
    """The l values whose gate passes and whose lhs key is live."""
    lw = ell_omega(model, B)
    if kind == "R1":
        return range(1, (lw - 1) // 2 + 1)
    if kind == "R2":
        return range(2, lw // 2 + 1)
    return range(1, lw // 2 + 1)


def enumerate_instances(model, degree_bound, triples=None, complex_provider=None):
    """All gate-passing instances up to the degree bound, in a fixed order."""
    if degree_bound < 1:
        raise GateViolation("degree bound must be at least 1")
    if triples is None:
        triples = model.divisor_triples
    instances = []
    for degree in range(1, degree_bound + 1):
        for kind in KINDS:
            for B in admissible_classes(model, degree):
                for l in applicable_l_range(kind, model, B):
                    for triple in triples:
                        if kind == "R3" and len(triple) < 3:
                            continue
                        inst = instantiate(kind, model, B, l, triple, complex_provider)
                        instances.append(inst)
    return instances


def instance_to_jsonable(inst):
    return {
        "kind": inst.kind,
        "B": list(inst.lhs_key.B.coeffs),
        "l": inst.lhs_key.l,
        "lhs_coeff": inst.lhs_coeff,
        "monomials": [
            {
                "coeff": "%d/%d" % (m.coeff.numerator, m.coeff.denominator),
                "factors": [[list(f.B.coeffs), f.l] for f in m.factors],
            }
            for m in inst.monomials
        ],
    }
