"""Structural composability certificate for a pair of msCRCs.

A pass means the pair is provably composable; a fail only means this
sufficient condition does not apply.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import MsCrc
from .reduction import ReducedSystem, reduce_mscrc
from .structure import (
    StructuralReport,
    UndeterminedError,
    deficiency,
    linkage_classes,
    reversibility_flags,
    structural_report,
)

PASS, FAIL, UNDETERMINED = "pass", "fail", "undetermined"

CONDITIONS = ("weakly_reversible", "single_linkage_class", "zero_deficiency", "mass_conservative")


@dataclass(frozen=True)
class AssumptionReport:
    wiring: bool  # outputs of c1 are exactly the inputs of c2, no output clash
    catalytic_inputs: bool  # c2 never changes its input species
    diagnostics: tuple[str, ...] = ()
    limits: str = "assumed"  # existence of limits; discharged numerically by verify

    @property
    def ok(self) -> bool:
        return self.wiring and self.catalytic_inputs

    def to_dict(self) -> dict:
        return {
            "A1_wiring": self.wiring,
            "A2_catalytic_inputs": self.catalytic_inputs,
            "A3_limits": self.limits,
            "diagnostics": list(self.diagnostics),
        }


def check_assumptions(c1: MsCrc, c2: MsCrc) -> AssumptionReport:
    diags = []
    y1, x2 = set(c1.output_names), set(c2.input_names)
    wiring = True
    if y1 != x2:
        wiring = False
        diags.append(f"A.1: outputs of c1 {sorted(y1)} differ from inputs of c2 {sorted(x2)}")
    clash = set(c2.output_names) & set(c1.crn.names)
    if clash:
        wiring = False
        diags.append(f"A.1: outputs of c2 collide with species of c1: {sorted(clash)}")

    catalytic = True
    inputs = set(c2.inputs)
    names = c2.crn.names
    for j, rxn in enumerate(c2.crn.reactions):
        moved = sorted(names[i] for i, d in rxn.net_change().items() if i in inputs)
        if moved:
            catalytic = False
            diags.append(f"A.2: reaction {j} of c2 changes input species {moved}")
    return AssumptionReport(wiring, catalytic, tuple(diags))


@dataclass(frozen=True)
class ComposabilityVerdict:
    assumptions: AssumptionReport
    certified: bool
    reasons: dict[str, str]
    conservation_vector: Optional[list[Fraction]] = None
    reduced: Optional[ReducedSystem] = field(default=None, compare=False)
    report: Optional[StructuralReport] = field(default=None, compare=False)

    @property
    def undetermined(self) -> bool:
        return not self.certified and UNDETERMINED in self.reasons.values()

    def to_dict(self) -> dict:
        cv = self.conservation_vector
        out = {
            "certified": self.certified,
            "assumptions_ok": self.assumptions.ok,
            "assumptions": self.assumptions.to_dict(),
            "reasons": dict(self.reasons),
            "conservation_vector": None if cv is None else [{"num": x.numerator, "den": x.denominator} for x in cv],
        }
        if self.reduced is not None:
            out["dropped_reactions"] = list(self.reduced.dropped)
        if self.report is not None:
            out["reduced_report"] = self.report.to_dict()
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _flag(ok: bool) -> str:
    return PASS if ok else FAIL


def certify_composable(c1: MsCrc, c2: MsCrc) -> ComposabilityVerdict:
    """Evaluate the structural conditions on the reduced system of ``c2``.

    The reduced network must be weakly reversible, consist of a single
    linkage class of deficiency zero, and admit a strictly positive
    conservation law. Reactions that project to no net change are left out
    before analysis.
    """
    assumptions = check_assumptions(c1, c2)
    reduced = reduce_mscrc(c2)
    crn = reduced.base
    try:
        report = structural_report(crn)
        mass = PASS if report.conservation_vector is not None else FAIL
        cv = report.conservation_vector
    except UndeterminedError:
        report = None
        mass, cv = UNDETERMINED, None

    if report is None:
        # combinatorial parts do not depend on the LP
        weakly = reversibility_flags(crn)["weakly_reversible"]
        n_classes = len(linkage_classes(crn))
        delta = deficiency(crn)
    else:
        weakly, n_classes, delta = report.weakly_reversible, report.n_linkage_classes, report.deficiency

    reasons = {
        "weakly_reversible": _flag(weakly),
        "single_linkage_class": _flag(n_classes == 1),
        "zero_deficiency": _flag(delta == 0),
        "mass_conservative": mass,
    }
    certified = assumptions.ok and all(v == PASS for v in reasons.values())
    return ComposabilityVerdict(assumptions, certified, reasons, cv, reduced, report)
