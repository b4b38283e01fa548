"""Numerical checks of dynamic computation and of composability.

Limits are taken to be the detected steady states of
:func:`~crncompose.dynamics.simulate`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .composability import check_assumptions
from .compose import WiringError, couple, rename_species
from .core import MsCrc, RhsKernel
from .dynamics import (
    IntegratorConfig,
    SimulationTrace,
    check_persistence,
    pseudo_helmholtz,
    simulate,
)
from .reduction import FrozenInput, ReducedSystem, TrajectoryInput, freeze_inputs, reduce_mscrc

Vector = Union[Sequence[float], Mapping[str, float], np.ndarray]


@dataclass
class VerificationReport:
    targets: dict[str, float]
    achieved: dict[str, float]
    errors: dict[str, float]
    tol: float
    steady: dict[str, bool]
    persistent: dict[str, bool] = field(default_factory=dict)
    baseline: dict[str, float] = field(default_factory=dict)
    traces: dict[str, SimulationTrace] = field(default_factory=dict, repr=False)

    @property
    def max_error(self) -> float:
        return max(self.errors.values(), default=0.0)

    @property
    def all_steady(self) -> bool:
        return all(self.steady.values())

    @property
    def passed(self) -> bool:
        return self.all_steady and self.max_error <= self.tol

    @property
    def status(self) -> str:
        if not self.all_steady:
            return "not-reached"
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "passed": self.passed,
            "tol": self.tol,
            "max_error": self.max_error,
            "targets": self.targets,
            "achieved": self.achieved,
            "errors": self.errors,
            "steady_state_reached": self.steady,
            "persistent": self.persistent,
            "baseline": self.baseline,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _as_vector(values: Vector, names: Sequence[str], what: str) -> np.ndarray:
    if isinstance(values, Mapping):
        unknown = set(values) - set(names)
        if unknown:
            raise ValueError(f"{what}: unknown species {sorted(unknown)}")
        return np.array([float(values.get(s, 0.0)) for s in names])
    arr = np.asarray(values, dtype=float)
    if arr.shape != (len(names),):
        raise ValueError(f"{what}: expected {len(names)} values for {list(names)}, got shape {arr.shape}")
    return arr


def _full_state(c: MsCrc, x0: Vector, y0: Vector) -> np.ndarray:
    s = np.zeros(c.crn.n_species)
    s[list(c.inputs)] = _as_vector(x0, c.input_names, "inputs")
    s[list(c.outputs)] = _as_vector(y0, c.output_names, "outputs")
    return s


def _limits(trace: SimulationTrace, names: Sequence[str]) -> dict[str, float]:
    ss = trace.steady_state
    state = ss.state if ss is not None else trace.states[-1]
    return {s: float(state[trace.names.index(s)]) for s in names}


def verify_dynamic_computation(
    c: MsCrc,
    x0: Vector,
    y0: Vector,
    target: Vector,
    tol: float = 1e-4,
    cfg: IntegratorConfig = IntegratorConfig(),
    persistence_threshold: float = 1e-3,
) -> VerificationReport:
    """Simulate ``c`` and compare its output limits with ``target``."""
    trace = simulate(c, _full_state(c, x0, y0), cfg)
    outs = c.output_names
    goal = dict(zip(outs, map(float, _as_vector(target, outs, "target"))))
    got = _limits(trace, outs)
    persistent = check_persistence(trace, persistence_threshold)
    return VerificationReport(
        targets=goal,
        achieved=got,
        errors={s: abs(got[s] - goal[s]) for s in outs},
        tol=tol,
        steady={"run": trace.steady_state is not None},
        persistent={s: persistent[s] for s in outs},
        traces={"run": trace},
    )


def verify_composition_numeric(
    c1: MsCrc,
    c2: MsCrc,
    x0: Vector,
    y0_1: Vector,
    y0_2: Vector,
    tol: float = 1e-4,
    cfg: IntegratorConfig = IntegratorConfig(),
    rename: Optional[Mapping[str, str]] = None,
) -> VerificationReport:
    """Compare the coupled limits with the layer-by-layer limits.

    Runs ``c1`` alone to get its output limit, then the reduced ``c2`` with
    its inputs frozen at that limit, then the coupled network. The report
    passes when all three runs settle and the coupled limits agree with the
    layered ones within ``tol``.

    Raises:
        WiringError: the pair does not satisfy the wiring assumptions.
    """
    if rename:
        c2 = rename_species(c2, rename)
    assumptions = check_assumptions(c1, c2)
    if not assumptions.ok:
        raise WiringError("; ".join(assumptions.diagnostics))

    first = simulate(c1, _full_state(c1, x0, y0_1), cfg)
    y1_bar = _limits(first, c1.output_names)

    reduced = reduce_mscrc(c2)
    y2_start = _as_vector(y0_2, c2.output_names, "outputs of c2")
    if reduced.base.reactions:
        frozen = freeze_inputs(reduced, y1_bar)
        second = simulate(frozen, y2_start, cfg)
        y2_bar = _limits(second, c2.output_names)
        second_steady = second.steady_state is not None
    else:
        # nothing moves the outputs of c2
        second = None
        y2_bar = dict(zip(c2.output_names, map(float, y2_start)))
        second_steady = True

    coupled = couple(c1, c2)
    crn = coupled.crn
    s0 = np.zeros(crn.n_species)
    s0[list(coupled.mscrc.inputs)] = _as_vector(x0, c1.input_names, "inputs")
    for name, value in zip(c1.output_names, _as_vector(y0_1, c1.output_names, "outputs of c1")):
        s0[crn.index(name)] = value
    for name, value in zip(c2.output_names, y2_start):
        s0[crn.index(name)] = value
    joint = simulate(coupled, s0, cfg)

    baseline = {**y1_bar, **y2_bar}
    got = _limits(joint, list(baseline))
    persistent = check_persistence(joint)
    traces = {"c1": first, "coupled": joint}
    if second is not None:
        traces["layered_c2"] = second
    return VerificationReport(
        targets=baseline,
        achieved=got,
        errors={s: abs(got[s] - baseline[s]) for s in baseline},
        tol=tol,
        steady={
            "c1": first.steady_state is not None,
            "layered_c2": second_steady,
            "coupled": joint.steady_state is not None,
        },
        persistent={s: persistent[s] for s in baseline},
        baseline=baseline,
        traces=traces,
    )


@dataclass
class DescentProbe:
    times: np.ndarray
    values: np.ndarray  # pseudo-Helmholtz value per sample, nan off the open orthant
    settle_time: Optional[float]
    descent_after_settle: bool
    descent_from: Optional[float]
    outcome: str  # "converged", "boundary" or "undecided"
    persistent: bool
    trace: SimulationTrace = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "settle_time": self.settle_time,
            "descent_after_settle": self.descent_after_settle,
            "descent_from": self.descent_from,
            "outcome": self.outcome,
            "persistent": self.persistent,
        }


def lyapunov_descent_probe(
    reduced: ReducedSystem,
    s_bar: Vector,
    y0: Vector,
    eta: float = 1e-6,
    cfg: IntegratorConfig = IntegratorConfig(),
    slack: float = 1e-10,
    settle_tol: float = 1e-6,
    threshold: float = 1e-3,
) -> DescentProbe:
    """Track the pseudo-Helmholtz function of a driven reduced system.

    Reports whether it decreases (up to ``slack`` per sample) at every
    sample after the inputs settle, as long as the state is at least
    ``eta`` away from ``s_bar``, and whether the run converged to ``s_bar``
    or approached the boundary of the orthant.
    """
    if not isinstance(reduced.binding, (TrajectoryInput, FrozenInput)):
        raise ValueError("reduced system must be bound to an input")
    names = reduced.base.names
    target = _as_vector(s_bar, names, "s_bar")
    trace = simulate(reduced, _as_vector(y0, names, "y0"), cfg)
    cols = [trace.names.index(s) for s in names]
    ys = trace.states[:, cols]
    values = np.array([pseudo_helmholtz(y, target) if np.all(y > 0) else np.nan for y in ys])

    if isinstance(reduced.binding, TrajectoryInput):
        driver = reduced.binding.driver
        kernel = RhsKernel(driver)
        nd = driver.n_species
        driver_res = [float(np.max(np.abs(kernel(s[:nd])), initial=0.0)) for s in trace.states]
        settle = _settled_since(trace.times, driver_res, settle_tol)
    else:
        settle = 0.0

    dist = np.max(np.abs(ys - target), axis=1)
    ok_pair = np.ones(len(values) - 1, dtype=bool)
    for i in range(len(values) - 1):
        if dist[i] < eta or np.isnan(values[i]) or np.isnan(values[i + 1]):
            continue
        ok_pair[i] = values[i + 1] <= values[i] + slack
    bad = np.flatnonzero(~ok_pair)
    descent_from = float(trace.times[bad[-1] + 1]) if bad.size else float(trace.times[0])
    descent_after = settle is not None and bool(np.all(trace.times[bad] < settle))

    persistence = check_persistence(trace, threshold)
    persistent = all(persistence[s] for s in names)
    if persistent and dist[-1] <= max(eta, 1e3 * cfg.ss_tol):
        outcome = "converged"
    elif not persistent:
        outcome = "boundary"
    else:
        outcome = "undecided"
    return DescentProbe(trace.times, values, settle, bool(descent_after), descent_from, outcome, persistent, trace)


def _settled_since(times, residuals, tol) -> Optional[float]:
    since = None
    for t, r in zip(times, residuals):
        if r <= tol:
            since = t if since is None else since
        else:
            since = None
    return None if since is None else float(since)
