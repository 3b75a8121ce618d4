"""Curve-class lattice of the plane and its real blowups.

Classes live in the (L, E1, ..., Er) basis with intersection form
diag(1, -1, ..., -1); a class (d, c1, ..., cr) means d*L + sum(ci * Ei),
so the conventional multiplicity at the i-th blown-up point is -ci.
The conjugation acts as minus the identity on supported surfaces.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import InvalidClass, InvalidDivisorTriple, NonInjectiveConjugation

MAX_BLOWUPS = 8  # finiteness of the class enumeration needs rank <= 9


@dataclass(frozen=True)
class CurveClass:
    coeffs: tuple

    def __add__(self, other):
        return CurveClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return CurveClass(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return CurveClass(tuple(-a for a in self.coeffs))

    @property
    def is_zero(self):
        return all(a == 0 for a in self.coeffs)

    def __str__(self):
        return "(" + ",".join(str(a) for a in self.coeffs) + ")"


@dataclass(frozen=True)
class DivisorClass:
    """Anti-invariant divisor, stored as a class vector in the same basis."""

    covector: tuple

    def __str__(self):
        return "<" + ",".join(str(a) for a in self.covector) + ">"


def _matvec(mat, vec):
    return tuple(sum(row[j] * vec[j] for j in range(len(vec))) for row in mat)


def _identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _det(mat):
    # exact determinant by fraction elimination; inputs are tiny
    n = len(mat)
    rows = [[Fraction(x) for x in row] for row in mat]
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if rows[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = -det
        det *= rows[col][col]
        inv = 1 / rows[col][col]
        for i in range(col + 1, n):
            factor = rows[i][col] * inv
            if factor:
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[col])]
    return det


@dataclass(frozen=True)
class SurfaceModel:
    rank: int
    basis_labels: tuple
    intersection_matrix: tuple
    c1: tuple
    phi_star: tuple
    divisor_triples: tuple

    def __post_init__(self):
        n = self.rank
        q = self.intersection_matrix
        if len(q) != n or any(len(row) != n for row in q):
            raise InvalidClass("intersection matrix does not match rank %d" % n)
        if any(q[i][j] != q[j][i] for i in range(n) for j in range(n)):
            raise InvalidClass("intersection matrix is not symmetric")
        if abs(_det(q)) != 1:
            raise InvalidClass("intersection matrix is not unimodular")
        phi = self.phi_star
        ident = _identity(n)
        phi2 = tuple(
            tuple(sum(phi[i][k] * phi[k][j] for k in range(n)) for j in range(n))
            for i in range(n)
        )
        if phi2 != ident:
            raise InvalidClass("conjugation action does not square to the identity")
        # anti-invariance of the canonical data: phi must negate c1
        if _matvec(phi, self.c1) != tuple(-a for a in self.c1):
            raise InvalidClass("c1 is not anti-invariant under the conjugation")
        for idx, triple in enumerate(self.divisor_triples):
            validate_triple(self, *triple)

    # -- constructors ------------------------------------------------------

    @classmethod
    def p2(cls, triples=None):
        model = cls._bare(1)
        return cls._with_triples(model, triples)

    @classmethod
    def blowup(cls, r, triples=None):
        if not 1 <= r <= MAX_BLOWUPS:
            raise InvalidClass(
                "blowups supported for 1 <= r <= %d points, got r=%s"
                % (MAX_BLOWUPS, r)
            )
        model = cls._bare(1 + r)
        return cls._with_triples(model, triples)

    @classmethod
    def _bare(cls, rank):
        labels = ("L",) + tuple("E%d" % i for i in range(1, rank))
        diag = tuple(
            tuple((1 if i == 0 else -1) if i == j else 0 for j in range(rank))
            for i in range(rank)
        )
        c1 = (3,) + (-1,) * (rank - 1)
        phi = tuple(tuple(-1 if i == j else 0 for j in range(rank)) for i in range(rank))
        return cls(rank, labels, diag, c1, phi, ())

    @classmethod
    def _with_triples(cls, model, triples):
        if triples is None:
            triples = default_triples(model.rank)
        triples = tuple(
            tuple(h if isinstance(h, DivisorClass) else DivisorClass(tuple(h)) for h in t)
            for t in triples
        )
        return cls(
            model.rank,
            model.basis_labels,
            model.intersection_matrix,
            model.c1,
            model.phi_star,
            triples,
        )

    @classmethod
    def from_config(cls, source):
        """Build a model from {"surface": "p2" | {"blowup": r},
        "divisor_triples": [[...], ...]} (dict, JSON text, or file path)."""
        if isinstance(source, str):
            try:
                cfg = json.loads(source)
            except ValueError:
                with open(source) as fh:
                    cfg = json.load(fh)
        else:
            cfg = source
        surface = cfg.get("surface", "p2")
        triples = cfg.get("divisor_triples")
        if triples is not None:
            triples = [tuple(tuple(h) for h in t) for t in triples]
        if surface == "p2":
            return cls.p2(triples)
        if isinstance(surface, dict) and "blowup" in surface:
            return cls.blowup(int(surface["blowup"]), triples)
        raise InvalidClass("unknown surface %r" % (surface,))


def default_triples(rank):
    """(h,h) everywhere; blowups additionally get (h,h,e1)."""
    h = DivisorClass((1,) + (0,) * (rank - 1))
    if rank == 1:
        return ((h, h),)
    e1 = DivisorClass((0, 1) + (0,) * (rank - 2))
    return ((h, h), (h, h, e1))


# -- basic pairings --------------------------------------------------------


def _check(model, B):
    if len(B.coeffs) != model.rank:
        raise InvalidClass(
            "class %s does not match rank %d" % (B, model.rank)
        )


def intersect(model, B, Bp):
    """Homology intersection product of two curve classes."""
    _check(model, B)
    _check(model, Bp)
    q = model.intersection_matrix
    return sum(
        B.coeffs[i] * q[i][j] * Bp.coeffs[j]
        for i in range(model.rank)
        for j in range(model.rank)
    )


def pair(model, H, B):
    """Pairing of a divisor with a curve class via the intersection form."""
    _check(model, B)
    if len(H.covector) != model.rank:
        raise InvalidClass("divisor %s does not match rank %d" % (H, model.rank))
    q = model.intersection_matrix
    return sum(
        H.covector[i] * q[i][j] * B.coeffs[j]
        for i in range(model.rank)
        for j in range(model.rank)
    )


def c1_degree(model, B):
    _check(model, B)
    return intersect(model, CurveClass(model.c1), B)


def ell_omega(model, B):
    """Number of point conditions a rational curve of this class absorbs."""
    return c1_degree(model, B) - 1


def real_dim_k(model, B, l):
    """Count of real point constraints left after l conjugate pairs.

    May be negative; a negative value marks the invariant as zero."""
    return ell_omega(model, B) - 2 * l


def bracket_indicator(model, B, l):
    return 1 if 2 * l == ell_omega(model, B) - 1 else 0


def doubling(model, Bp):
    _check(model, Bp)
    return Bp - CurveClass(_matvec(model.phi_star, Bp.coeffs))


def halve(model, B):
    """The unique Bp with doubling(Bp) = B, or None when there is none."""
    _check(model, B)
    n = model.rank
    m = [
        [Fraction((1 if i == j else 0) - model.phi_star[i][j]) for j in range(n)]
        for i in range(n)
    ]
    if _det(m) == 0:
        raise NonInjectiveConjugation(
            "conjugation with singular (I - phi_star) is unsupported"
        )
    rhs = [Fraction(b) for b in B.coeffs]
    # forward elimination with the same pivots as _det would use
    for col in range(n):
        piv = next(i for i in range(col, n) if m[i][col] != 0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
        for i in range(n):
            if i != col and m[i][col] != 0:
                factor = m[i][col] / m[col][col]
                m[i] = [a - factor * b for a, b in zip(m[i], m[col])]
                rhs[i] -= factor * rhs[col]
    sol = [rhs[i] / m[i][i] for i in range(n)]
    if any(x.denominator != 1 for x in sol):
        return None
    return CurveClass(tuple(int(x) for x in sol))


def validate_triple(model, H1, H2, H3=None):
    """Check the pairing conditions a divisor triple must satisfy."""
    for H in (H1, H2) + ((H3,) if H3 is not None else ()):
        if len(H.covector) != model.rank:
            raise InvalidDivisorTriple("divisor %s does not match the lattice" % (H,))
        img = _matvec(model.phi_star, H.covector)
        if img != tuple(-a for a in H.covector):
            raise InvalidDivisorTriple("divisor %s is not anti-invariant" % (H,))
    h1h2 = intersect(model, CurveClass(H1.covector), CurveClass(H2.covector))
    if h1h2 != 1:
        raise InvalidDivisorTriple(
            "H1.H2 must equal 1, got %d for %s, %s" % (h1h2, H1, H2)
        )
    if H3 is not None:
        h1h3 = intersect(model, CurveClass(H1.covector), CurveClass(H3.covector))
        if h1h3 != 0:
            raise InvalidDivisorTriple(
                "H1.H3 must vanish, got %d for %s, %s" % (h1h3, H1, H3)
            )
    return True


# -- admissible cone -------------------------------------------------------


def is_admissible(model, B):
    """Support superset for the lattice sums.

    Exceptional classes Ei, and classes d*L + sum(ci*Ei) with d >= 1 and
    -d <= ci <= 0, further filtered by c1.B >= 1 and arithmetic genus >= 0;
    classes outside carry zero invariants."""
    _check(model, B)
    d = B.coeffs[0]
    rest = B.coeffs[1:]
    if d == 0:
        # exactly one exceptional coefficient 1, everything else 0
        if sum(rest) != 1 or any(c not in (0, 1) for c in rest):
            return False
    else:
        if d < 1 or any(not -d <= c <= 0 for c in rest):
            return False
    deg = c1_degree(model, B)
    if deg < 1:
        return False
    return intersect(model, B, B) >= deg - 2


def _min_square_split(total, slots, cap):
    """Smallest possible sum of squares of `slots` integers in [0, cap]
    adding up to `total`; infinity substitute when infeasible."""
    if total > slots * cap:
        return None
    q, rem = divmod(total, slots)
    return rem * (q + 1) ** 2 + (slots - rem) * q**2


@lru_cache(maxsize=None)
def admissible_classes(model, degree):
    """All admissible classes with c1.B equal to `degree`, coeff-sorted."""
    if degree < 1:
        return ()
    n = model.rank
    out = []
    if n == 1:
        if degree % 3 == 0:
            out.append(CurveClass((degree // 3,)))
        return tuple(out)
    r = n - 1
    if degree == 1:
        for i in range(r):
            out.append(CurveClass((0,) + (0,) * i + (1,) + (0,) * (r - i - 1)))
    # d*L classes: 3d + sum(ci) = degree, ci in [-d, 0], sum(ci^2) <= d^2-degree+2
    disc = 36 * degree**2 - 4 * (9 - r) * (degree**2 + r * degree - 2 * r)
    if disc >= 0:
        dmax = (6 * degree + math.isqrt(disc)) // (2 * (9 - r))
        for d in range(max(1, -(-degree // 3)), dmax + 1):
            total = 3 * d - degree  # sum of multiplicities
            if total < 0:
                continue
            sq_budget = d * d - degree + 2
            if sq_budget < 0:
                continue
            lo = _min_square_split(total, r, d)
            if lo is None or lo > sq_budget:
                continue
            stack = [((), total, sq_budget)]
            while stack:
                prefix, rem_total, rem_sq = stack.pop()
                slots = r - len(prefix)
                if slots == 0:
                    if rem_total == 0:
                        out.append(CurveClass((d,) + prefix))
                    continue
                for m in range(min(d, rem_total) + 1):
                    nt, nsq = rem_total - m, rem_sq - m * m
                    if nsq < 0:
                        break
                    if slots > 1:
                        lo = _min_square_split(nt, slots - 1, d)
                        if lo is None or lo > nsq:
                            continue
                    elif nt != 0:
                        continue
                    stack.append((prefix + (-m,), nt, nsq))
    return tuple(sorted(out, key=lambda c: c.coeffs))


def decompositions(model, B):
    """All ordered pairs of nonzero admissible classes summing to B."""
    _check(model, B)
    total = c1_degree(model, B)
    pairs = []
    for t in range(1, total):
        for B1 in admissible_classes(model, t):
            B2 = B - B1
            if is_admissible(model, B2):
                pairs.append((B1, B2))
    return pairs
