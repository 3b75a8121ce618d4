"""Internal consistency checks built on the overdetermination of the system.

Every invariant that two structurally different subsets of the relations can
both pin must come out identical; any residual of a fully determined relation
instance must vanish; and the low-degree plane values must reproduce the
table shipped with the package."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .errors import Mismatch, UnknownKey
from .lattice import CurveClass, c1_degree
from .relations import RealKey, enumerate_instances
from .solver import residual, solve


def _split_instances(instances):
    """Two structurally different halves of the relation list.

    The first keeps only the first relation family.  The second keeps the
    second family wherever its gate admits it, plus the first family at
    l = 1 where the second family has no reach.  Both halves contain every
    equation only once and neither equals the full list."""
    first = [inst for inst in instances if inst.kind == "R1"]
    second = [
        inst
        for inst in instances
        if inst.kind == "R2" or (inst.kind == "R1" and inst.lhs_key.l == 1)
    ]
    return first, second


@dataclass
class CrossCheckReport:
    degree_bound: int
    first_pinned: dict = field(default_factory=dict)
    second_pinned: dict = field(default_factory=dict)
    overlap: tuple = ()

    def to_jsonable(self):
        keyrepr = lambda k: [list(k.B.coeffs), k.l]
        return {
            "degree_bound": self.degree_bound,
            "first_pinned": [[keyrepr(k), int(v)] for k, v in sorted(
                self.first_pinned.items(),
                key=lambda kv: (kv[0].B.coeffs, kv[0].l),
            )],
            "second_pinned": [[keyrepr(k), int(v)] for k, v in sorted(
                self.second_pinned.items(),
                key=lambda kv: (kv[0].B.coeffs, kv[0].l),
            )],
            "overlap": [keyrepr(k) for k in self.overlap],
        }


def cross_subset_check(model, complex_provider, degree_bound, triples=None, seeds=None):
    """Solve two disjoint-by-construction relation subsets and compare.

    Subset solves tolerate equations that stay quadratic without the full
    system's support; those are dropped, which only shrinks what each
    subset can pin.  Raises Mismatch if the subsets disagree on any
    invariant they both determine."""
    instances = enumerate_instances(model, degree_bound, triples, complex_provider)
    first, second = _split_instances(instances)
    report = CrossCheckReport(degree_bound=degree_bound)
    tables = []
    for subset in (first, second):
        table, _ = solve(
            model,
            complex_provider,
            degree_bound,
            triples=triples,
            seeds=seeds,
            skip_nonlinear=True,
            instances=subset,
        )
        tables.append(table)
    ta, tb = tables
    report.first_pinned = {
        k: v for k, v in ta.solved.items() if k not in ta.seeds
    }
    report.second_pinned = {
        k: v for k, v in tb.solved.items() if k not in tb.seeds
    }
    overlap = sorted(
        set(report.first_pinned) & set(report.second_pinned),
        key=lambda k: (c1_degree(model, k.B), k.B.coeffs, k.l),
    )
    report.overlap = tuple(overlap)
    bad = [
        (k, report.first_pinned[k], report.second_pinned[k])
        for k in overlap
        if report.first_pinned[k] != report.second_pinned[k]
    ]
    if bad:
        raise Mismatch(bad)
    return report


def residual_sweep(model, instances, table):
    """Residuals of every instance the table fully determines.

    Returns (checked, nonzero) where nonzero lists (instance, value)."""
    checked = 0
    nonzero = []
    for inst in instances:
        try:
            value = residual(inst, table)
        except UnknownKey:
            continue
        checked += 1
        if value != 0:
            nonzero.append((inst, value))
    return checked, nonzero


def load_expected_table():
    """Reference values shipped with the package: ((coeffs, l), value, note)."""
    out = []
    text = resources.files("realwdvv").joinpath("data/expected_p2.csv").read_text()
    for row in csv.DictReader(text.splitlines()):
        coeffs = tuple(int(x) for x in row["coeffs"].split())
        out.append(
            (
                RealKey(CurveClass(coeffs), int(row["l"])),
                int(row["abs_value"]),
                row["source"],
            )
        )
    return out


def expected_values_check(table):
    """Compare |N| against the shipped plane reference table.

    Returns (matched, mismatched, missing) lists of (key, expected, got)."""
    matched, mismatched, missing = [], [], []
    for key, expected, _ in load_expected_table():
        got = table.get(key)
        if got is None:
            missing.append((key, expected, None))
        elif abs(got) == expected:
            matched.append((key, expected, abs(int(got))))
        else:
            mismatched.append((key, expected, abs(int(got))))
    return matched, mismatched, missing
