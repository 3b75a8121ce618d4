"""Staged exact elimination over the instantiated relation system.

Stages run in ascending c1-degree.  Equations whose rank is not yet full are
carried in a pending pool across stages; this is what eventually pins the
l = 0 invariants, which never occur on a left-hand side, from the
overdetermination one stage later.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InconsistentSystem, NonlinearFrontier, UnknownKey
from .lattice import CurveClass, admissible_classes, c1_degree, real_dim_k
from .relations import RealKey, enumerate_instances, is_live

STATUS_SEEDED = "seeded"
STATUS_SOLVED = "solved"
STATUS_STRAGGLER = "straggler"
STATUS_UNRESOLVED = "unresolved"


def default_seeds(model):
    """One real line through two real points, and one real curve per
    exceptional class; both normalized to +1."""
    if model.rank == 1:
        return {RealKey(CurveClass((1,)), 0): Fraction(1)}
    seeds = {}
    for i in range(model.rank - 1):
        e = [0] * model.rank
        e[1 + i] = 1
        seeds[RealKey(CurveClass(tuple(e)), 0)] = Fraction(1)
    return seeds


class InvariantTable:
    """Solved and seeded real invariants of one surface."""

    def __init__(self, model, seeds):
        self.model = model
        self.seeds = dict(seeds)
        self.solved = dict(seeds)
        self.status = {key: STATUS_SEEDED for key in seeds}

    def assign(self, key, value):
        if key in self.seeds and self.seeds[key] != value:
            raise InconsistentSystem(
                "solver derived %s = %s against seed %s"
                % (key, value, self.seeds[key])
            )
        self.solved[key] = value
        if key not in self.seeds:
            self.status[key] = STATUS_SOLVED

    def __contains__(self, key):
        return key in self.solved

    def get(self, key, default=None):
        return self.solved.get(key, default)

    def value(self, key):
        """Exact value; dead keys read zero, live unsolved keys raise."""
        if key in self.solved:
            return self.solved[key]
        if not is_live(self.model, key):
            return Fraction(0)
        raise UnknownKey("invariant %s is not determined" % (key,))

    def live_keys(self, degree_bound):
        for degree in range(1, degree_bound + 1):
            for B in admissible_classes(self.model, degree):
                lw = degree - 1
                for l in range(0, lw // 2 + 1):
                    yield RealKey(B, l)

    def rows(self, degree_bound=None):
        """(key, value-or-None, status) sorted by (degree, coeffs, l)."""
        keys = set(self.status)
        if degree_bound is not None:
            keys.update(self.live_keys(degree_bound))
        out = []
        for key in sorted(
            keys, key=lambda k: (c1_degree(self.model, k.B), k.B.coeffs, k.l)
        ):
            out.append(
                (key, self.solved.get(key), self.status.get(key, STATUS_UNRESOLVED))
            )
        return out


@dataclass
class StageRecord:
    degree: int
    unknowns: tuple
    equations: int
    rank: int
    pinned: tuple
    carried: int


@dataclass
class SolveReport:
    surface: str
    degree_bound: int
    instance_count: int = 0
    stages: list = field(default_factory=list)
    stragglers: tuple = ()
    unresolved: tuple = ()
    skipped_nonlinear: int = 0
    residuals_checked: int = 0
    residuals_nonzero: int = 0
    seconds: float = 0.0

    def to_jsonable(self):
        keyrepr = lambda k: [list(k.B.coeffs), k.l]
        return {
            "surface": self.surface,
            "degree_bound": self.degree_bound,
            "instances": self.instance_count,
            "stages": [
                {
                    "degree": s.degree,
                    "unknowns": [keyrepr(k) for k in s.unknowns],
                    "equations": s.equations,
                    "rank": s.rank,
                    "pinned": [keyrepr(k) for k in s.pinned],
                    "carried": s.carried,
                }
                for s in self.stages
            ],
            "stragglers": [keyrepr(k) for k in self.stragglers],
            "unresolved": [keyrepr(k) for k in self.unresolved],
            "skipped_nonlinear": self.skipped_nonlinear,
            "residuals_checked": self.residuals_checked,
            "residuals_nonzero": self.residuals_nonzero,
            "seconds": self.seconds,
        }


def _substitute(instance, table):
    """Fold solved factors into coefficients.

    Returns (row, rhs) for row . unknowns = rhs, or None when the equation
    degenerates to 0 = 0.  Raises NonlinearFrontier on a genuinely quadratic
    leftover."""
    const = Fraction(0)
    linear = {}
    for mono in instance.monomials:
        coeff = mono.coeff
        unknown = None
        second = None
        for key in mono.factors:
            if key in table:
                coeff *= table.solved[key]
            elif unknown is None:
                unknown = key
            else:
                second = key
        if second is not None:
            raise NonlinearFrontier((unknown, second), instance)
        if coeff == 0:
            continue
        if unknown is None:
            const += coeff
        else:
            linear[unknown] = linear.get(unknown, Fraction(0)) + coeff
    row = {k: -v for k, v in linear.items() if v != 0}
    rhs = const
    lhs = instance.lhs_key
    if instance.lhs_coeff != 0:
        if lhs in table:
            rhs -= instance.lhs_coeff * table.solved[lhs]
        else:
            row[lhs] = row.get(lhs, Fraction(0)) + instance.lhs_coeff
            if row[lhs] == 0:
                del row[lhs]
    if not row:
        if rhs != 0:
            raise InconsistentSystem(
                "contradiction 0 = %s from %s" % (rhs, instance)
            )
        return None
    return row, rhs


def _key_order(model):
    return lambda key: (c1_degree(model, key.B), key.B.coeffs, key.l)


def _eliminate(model, pool, table):
    """Reduce the pending pool, pinning every fully determined unknown.

    Returns (rank, pinned_keys, leftover_rows)."""
    order = _key_order(model)
    pinned = []
    rank = 0
    while True:
        rows = []
        for row, rhs in pool:
            row = dict(row)
            for key in list(row):
                if key in table:
                    rhs -= row.pop(key) * table.solved[key]
            row = {k: v for k, v in row.items() if v != 0}
            if not row:
                if rhs != 0:
                    raise InconsistentSystem("contradiction 0 = %s" % (rhs,))
                continue
            rows.append((row, rhs))
        columns = sorted({k for row, _ in rows for k in row}, key=order)
        reduced = []
        for col in columns:
            piv = next((i for i, (row, _) in enumerate(rows) if row.get(col)), None)
            if piv is None:
                continue
            prow, prhs = rows.pop(piv)
            pc = prow[col]
            prow = {k: v / pc for k, v in prow.items()}
            prhs = prhs / pc
            for i, (row, rhs) in enumerate(rows):
                f = row.get(col)
                if f:
                    row = {
                        k: row.get(k, Fraction(0)) - f * prow.get(k, Fraction(0))
                        for k in set(row) | set(prow)
                    }
                    rows[i] = ({k: v for k, v in row.items() if v != 0}, rhs - f * prhs)
            for i, (row, rhs) in enumerate(reduced):
                f = row.get(col)
                if f:
                    row = {
                        k: row.get(k, Fraction(0)) - f * prow.get(k, Fraction(0))
                        for k in set(row) | set(prow)
                    }
                    reduced[i] = ({k: v for k, v in row.items() if v != 0}, rhs - f * prhs)
            reduced.append((prow, prhs))
        for row, rhs in rows:
            if rhs != 0:
                raise InconsistentSystem("contradiction 0 = %s" % (rhs,))
        rank = max(rank, len(reduced))
        progressed = False
        for row, rhs in reduced:
            if len(row) == 1:
                ((key, coeff),) = row.items()
                table.assign(key, rhs / coeff)
                if key not in pinned:
                    pinned.append(key)
                progressed = True
        pool = [(row, rhs) for row, rhs in reduced if len(row) > 1]
        if not progressed:
            return rank, pinned, pool


def solve(
    model,
    complex_provider,
    degree_bound,
    triples=None,
    seeds=None,
    skip_nonlinear=False,
    instances=None,
):
    """Run the staged solve; returns (InvariantTable, SolveReport).

    skip_nonlinear drops equations with quadratic leftovers instead of
    raising; used by the consistency battery's subset runs."""
    start = time.perf_counter()
    if seeds is None:
        seeds = default_seeds(model)
    seeds = {key: Fraction(value) for key, value in seeds.items()}
    for key in default_seeds(model):
        if key not in seeds:
            raise InconsistentSystem("seed for %s is required" % (key,))
    if model.rank == 1 and degree_bound < 3:
        raise InconsistentSystem("the plane needs a degree bound of at least 3")
    for key in seeds:
        if not is_live(model, key):
            raise InconsistentSystem("seed key %s is not a live invariant" % (key,))

    if instances is None:
        instances = enumerate_instances(model, degree_bound, triples, complex_provider)
    by_stage = {}
    touched = set()
    for inst in instances:
        by_stage.setdefault(c1_degree(model, inst.lhs_key.B), []).append(inst)

    surface = "p2" if model.rank == 1 else "blowup:%d" % (model.rank - 1)
    report = SolveReport(surface=surface, degree_bound=degree_bound)
    report.instance_count = len(instances)
    table = InvariantTable(model, seeds)
    pool = []
    for degree in range(1, degree_bound + 1):
        fresh = 0
        for inst in by_stage.get(degree, ()):
            try:
                row = _substitute(inst, table)
            except NonlinearFrontier:
                if not skip_nonlinear:
                    raise
                report.skipped_nonlinear += 1
                continue
            if row is None:
                continue
            touched.update(row[0])
            pool.append(row)
            fresh += 1
        unknowns = tuple(
            sorted({k for row, _ in pool for k in row}, key=_key_order(model))
        )
        rank, pinned, pool = _eliminate(model, pool, table)
        report.stages.append(
            StageRecord(
                degree=degree,
                unknowns=unknowns,
                equations=fresh,
                rank=rank,
                pinned=tuple(pinned),
                carried=len(pool),
            )
        )

    for key in touched:
        if key not in table.solved:
            table.status[key] = STATUS_STRAGGLER
    report.stragglers = tuple(
        sorted(
            (k for k, s in table.status.items() if s == STATUS_STRAGGLER),
            key=_key_order(model),
        )
    )
    report.unresolved = tuple(
        sorted(
            (
                k
                for k in table.live_keys(degree_bound)
                if k not in table.solved and k not in touched
            ),
            key=_key_order(model),
        )
    )
    for key in report.unresolved:
        table.status.setdefault(key, STATUS_UNRESOLVED)

    bad = check_integrality(table)
    if bad:
        raise InconsistentSystem(
            "non-integral invariants: "
            + ", ".join("%s = %s" % (k, v) for k, v in bad)
        )
    for inst in instances:
        try:
            value = residual(inst, table)
        except UnknownKey:
            continue
        report.residuals_checked += 1
        if value != 0:
            report.residuals_nonzero += 1
    if report.residuals_nonzero:
        raise InconsistentSystem(
            "%d equations have nonzero residual after the solve"
            % report.residuals_nonzero
        )
    report.seconds = time.perf_counter() - start
    return table, report


def residual(instance, table):
    """lhs_coeff * N(lhs) minus the evaluated right-hand side, exact."""
    total = Fraction(0)
    if instance.lhs_coeff != 0:
        total = instance.lhs_coeff * table.value(instance.lhs_key)
    for mono in instance.monomials:
        term = mono.coeff
        for key in mono.factors:
            if term == 0:
                break
            term *= table.value(key)
        total -= term
    return total


def check_integrality(table):
    """Solved values must be integers; returns the violations."""
    order = _key_order(table.model)
    return [
        (key, value)
        for key, value in sorted(table.solved.items(), key=lambda kv: order(kv[0]))
        if value.denominator != 1
    ]


# -- table and report serialization ---------------------------------------


def table_to_csv(table, degree_bound=None, abs_only=False):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(table.model.basis_labels) + ["l", "value", "abs_value", "status"])
    for key, value, status in table.rows(degree_bound):
        if value is None:
            val, aval = "", ""
        else:
            val, aval = str(int(value)), str(abs(int(value)))
        if abs_only:
            val = aval
        writer.writerow(list(key.B.coeffs) + [key.l, val, aval, status])
    return buf.getvalue()


def table_to_jsonable(table, degree_bound=None, abs_only=False):
    rows = []
    for key, value, status in table.rows(degree_bound):
        value = None if value is None else int(value)
        rows.append(
            {
                "coeffs": list(key.B.coeffs),
                "l": key.l,
                "value": (abs(value) if abs_only else value) if value is not None else None,
                "abs_value": abs(value) if value is not None else None,
                "status": status,
            }
        )
    return {"basis_labels": list(table.model.basis_labels), "rows": rows}


def rows_from_csv(text):
    """Parse a table CSV back into (labels, rows) for re-emission."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    ncoeffs = len(header) - 4
    labels = header[:ncoeffs]
    rows = []
    for rec in reader:
        if not rec:
            continue
        coeffs = [int(x) for x in rec[:ncoeffs]]
        l = int(rec[ncoeffs])
        value = int(rec[ncoeffs + 1]) if rec[ncoeffs + 1] != "" else None
        abs_value = int(rec[ncoeffs + 2]) if rec[ncoeffs + 2] != "" else None
        rows.append(
            {
                "coeffs": coeffs,
                "l": l,
                "value": value,
                "abs_value": abs_value,
                "status": rec[ncoeffs + 3],
            }
        )
    return {"basis_labels": labels, "rows": rows}


def jsonable_to_csv(doc, abs_only=False):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(doc["basis_labels"]) + ["l", "value", "abs_value", "status"])
    for row in doc["rows"]:
        value = row["value"]
        aval = row["abs_value"]
        val = "" if value is None else str(abs(value) if abs_only else value)
        writer.writerow(
            list(row["coeffs"])
            + [row["l"], val, "" if aval is None else str(aval), row["status"]]
        )
    return buf.getvalue()


def write_report(report, path):
    with open(path, "w") as fh:
        json.dump(report.to_jsonable(), fh, indent=2, sort_keys=True)
        fh.write("\n")
