"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class InvalidClass(EngineError):
    """A curve class does not fit the surface lattice."""


class NonInjectiveConjugation(EngineError):
    """Halving is undefined because (I - phi_star) is singular."""


class InvalidDivisorTriple(EngineError):
    """A divisor triple violates one of its pairing conditions."""


class InvalidDegree(EngineError):
    """Degree argument outside the recursion's domain."""


class MissingComplexValue(EngineError):
    """A required complex invariant is absent from the ingestion table."""

    def __init__(self, curve_class):
        self.curve_class = curve_class
        super().__init__(
            "no complex invariant available for class %s; "
            "add it to the ingestion table" % (curve_class,)
        )


class ParseError(EngineError):
    """Malformed line in an ingestion, seed, or table file."""


class ConflictingEntry(EngineError):
    """Two table entries assign different values to the same class."""


class GateViolation(EngineError):
    """A relation was instantiated outside its applicability gate."""


class InconsistentSystem(EngineError):
    """The staged elimination produced a contradiction."""


class NonlinearFrontier(EngineError):
    """A product of two unsolved invariants survived substitution."""

    def __init__(self, keys, instance=None):
        self.keys = tuple(keys)
        self.instance = instance
        where = ""
        if instance is not None:
            where = " in %s at %s" % (instance.kind, instance.lhs_key)
        super().__init__(
            "nonlinear product of unsolved invariants %s%s; "
            "supply more divisor triples or seed one of the factors"
            % (", ".join(str(k) for k in self.keys), where)
        )


class UnknownKey(EngineError):
    """A live invariant was read before being solved."""


class Mismatch(EngineError):
    """Two independent determinations of the same invariant disagree."""

    def __init__(self, entries):
        self.entries = tuple(entries)
        super().__init__(
            "; ".join(
                "%s: %s vs %s" % (k, a, b) for k, a, b in self.entries
            )
        )
