"""Complex genus-0 invariants feeding the real recursions.

Plane values come from the classical degree recursion; blowup values are
ingested from a table file (plus a few built-in classical seeds) rather
than derived in-engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .errors import ConflictingEntry, InvalidDegree, MissingComplexValue, ParseError
from .lattice import CurveClass, admissible_classes, ell_omega, is_admissible

_plane_memo = {1: 1}


def kontsevich_p2(d, cache=None):
    """Count of rational plane curves of degree d through 3d-1 points."""
    if d < 1:
        raise InvalidDegree("degree must be positive, got %s" % (d,))
    memo = _plane_memo if cache is None else cache
    if 1 not in memo:
        memo[1] = 1
    for n in range(2, d + 1):
        if n in memo:
            continue
        total = 0
        for d1 in range(1, n):
            d2 = n - d1
            total += (
                memo[d1]
                * memo[d2]
                * (
                    d1 * d1 * d2 * d2 * comb(3 * n - 4, 3 * d1 - 2)
                    - d1**3 * d2 * comb(3 * n - 4, 3 * d1 - 1)
                )
            )
        memo[n] = total
    return memo[d]


@dataclass
class ComplexProvider:
    """Memoized source of complex invariants for one surface.

    kind "kontsevich_p2" computes plane classes; "table" serves ingested
    entries only; "composite" serves ingested entries and falls back to the
    plane recursion for exceptional-free classes."""

    kind: str
    cache: dict = field(default_factory=dict)
    table_source: str | None = None

    def lookup(self, model, B):
        return complex_invariant(self, model, B)

    def save_cache(self, path):
        with open(path, "w") as fh:
            fh.write("# complex invariants, one per line: coeffs : value\n")
            for B in sorted(self.cache, key=lambda c: (sum(c.coeffs), c.coeffs)):
                fh.write(
                    "%s : %d\n"
                    % (" ".join(str(a) for a in B.coeffs), self.cache[B])
                )


def complex_invariant(provider, model, B):
    """The complex invariant of B; zero off the admissible cone."""
    if B in provider.cache:
        return provider.cache[B]
    if not is_admissible(model, B) or ell_omega(model, B) < 0:
        return 0
    pure_plane = all(c == 0 for c in B.coeffs[1:])
    if provider.kind == "kontsevich_p2" or (provider.kind == "composite" and pure_plane):
        value = kontsevich_p2(B.coeffs[0])
    else:
        raise MissingComplexValue(B)
    provider.cache[B] = value
    return value


def blowup_seed_values(model):
    """Classical unit counts: Ei, L-Ei, and L-Ei-Ej for i<j."""
    seeds = {}
    r = model.rank - 1
    for i in range(r):
        e = [0] * model.rank
        e[1 + i] = 1
        seeds[CurveClass(tuple(e))] = 1
        line = [1] + [0] * r
        line[1 + i] = -1
        seeds[CurveClass(tuple(line))] = 1
        for j in range(i + 1, r):
            conic = [1] + [0] * r
            conic[1 + i] = -1
            conic[1 + j] = -1
            seeds[CurveClass(tuple(conic))] = 1
    return seeds


def load_complex_table(path, model, kind="table"):
    """Provider serving the file's entries plus the built-in blowup seeds.

    Line format: "coeffs... : value" with '#' comments; a duplicate entry
    must repeat the same value."""
    entries = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                left, right = line.split(":")
                coeffs = tuple(int(tok) for tok in left.split())
                value = int(right.strip())
            except ValueError:
                raise ParseError("%s:%d: cannot parse %r" % (path, lineno, raw.strip()))
            if len(coeffs) != model.rank:
                raise ParseError(
                    "%s:%d: expected %d coefficients, got %d"
                    % (path, lineno, model.rank, len(coeffs))
                )
            B = CurveClass(coeffs)
            if B in entries and entries[B] != value:
                raise ConflictingEntry(
                    "%s:%d: class %s already set to %d, now %d"
                    % (path, lineno, B, entries[B], value)
                )
            entries[B] = value
    provider = ComplexProvider(kind=kind, table_source=path)
    if model.rank > 1:
        for B, value in blowup_seed_values(model).items():
            if B in entries and entries[B] != value:
                raise ConflictingEntry(
                    "%s: class %s conflicts with the built-in seed value %d"
                    % (path, B, value)
                )
            provider.cache[B] = value
    provider.cache.update(entries)
    return provider


def default_provider(model):
    if model.rank == 1:
        return ComplexProvider(kind="kontsevich_p2")
    provider = ComplexProvider(kind="table")
    provider.cache.update(blowup_seed_values(model))
    return provider


def prefetch(provider, model, degree_bound):
    """Touch every admissible class up to the bound (cache warming)."""
    for degree in range(1, degree_bound + 1):
        for B in admissible_classes(model, degree):
            complex_invariant(provider, model, B)
