"""Simulation of (generalized) mass-action systems.

The integrator is the Dormand-Prince 5(4) embedded pair with its
free 4th-order continuous extension for sampling. Mass-action dynamics
keep the nonnegative orthant invariant, so any negative value is a
numerical artefact: steps that overshoot below ``-atol`` are rejected,
smaller excursions are clamped to zero, and both are logged.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .compose import CoupledSystem
from .core import Crn, DomainError, MsCrc, RhsKernel
from .reduction import FrozenInput, ReducedSystem, TrajectoryInput, freeze_inputs

log = logging.getLogger(__name__)


class IntegrationError(RuntimeError):
    pass


class MaxStepsExceeded(IntegrationError):
    pass


class StepSizeUnderflow(IntegrationError):
    """Step size collapsed; usually a sign of stiffness."""


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-8
    atol: float = 1e-10
    t_end: float = 100.0
    max_steps: int = 10**7
    ss_tol: float = 1e-9
    ss_window: float = 5.0
    samples: int = 1001

    def __post_init__(self):
        for name in ("rtol", "atol", "t_end", "ss_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.ss_window < 0:
            raise ValueError("ss_window must be nonnegative")
        if self.max_steps < 1 or self.samples < 2:
            raise ValueError("max_steps must be >= 1 and samples >= 2")


@dataclass(frozen=True)
class SteadyState:
    state: np.ndarray
    residual: float
    t_reached: float

    def to_dict(self, names: Sequence[str]) -> dict:
        return {
            "state": dict(zip(names, map(float, self.state))),
            "residual": self.residual,
            "t_reached": self.t_reached,
        }


@dataclass(frozen=True)
class Event:
    t: float
    kind: str
    detail: str = ""


@dataclass
class SimulationTrace:
    names: tuple[str, ...]
    times: np.ndarray
    states: np.ndarray
    residuals: np.ndarray
    steady_state: Optional[SteadyState] = None
    events: list[Event] = field(default_factory=list)
    n_steps: int = 0
    n_rejected: int = 0

    def column(self, name: str) -> np.ndarray:
        return self.states[:, self.names.index(name)]

    def final(self, names: Sequence[str] | None = None) -> np.ndarray:
        if names is None:
            return self.states[-1]
        return np.array([self.states[-1, self.names.index(s)] for s in names])

    def to_csv(self, fh=None) -> str:
        buf = fh or io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", *self.names])
        for t, row in zip(self.times, self.states):
            w.writerow([repr(float(t)), *(repr(float(x)) for x in row)])
        return buf.getvalue() if fh is None else ""

    def steady_json(self) -> str:
        ss = self.steady_state
        return json.dumps(
            {
                "steady_state": None if ss is None else ss.to_dict(self.names),
                "n_steps": self.n_steps,
                "n_rejected": self.n_rejected,
                "n_events": len(self.events),
            },
            indent=2,
        )


# Dormand-Prince 5(4) tableau
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# difference between the 5th- and 4th-order weights, over all 7 stages
_E = np.array([71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension: weights are _P @ [th, th^2, th^3, th^4]
_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

# |R(z)| of the pair is about 0.17 at z = -2
_DAMPED_RADIUS = 2.0

System = Union[Crn, MsCrc, ReducedSystem, CoupledSystem]


def resolve(system: System, s0) -> tuple[tuple[str, ...], Callable[[np.ndarray], np.ndarray], np.ndarray]:
    """Names, autonomous right-hand side, and full initial state of ``system``.

    For a reduced system driven by a trajectory, the driver network is
    integrated alongside and its species come first in the state.
    """
    s0 = np.asarray(s0, dtype=float)
    if isinstance(system, CoupledSystem):
        system = system.crn
    if isinstance(system, MsCrc):
        system = system.crn
    if isinstance(system, ReducedSystem):
        binding = system.binding
        if binding is None:
            raise ValueError("reduced system has no input binding; use bind() or freeze_inputs()")
        if isinstance(binding, FrozenInput):
            system = freeze_inputs(system, binding.values)
        else:
            return _resolve_trajectory(system, binding, s0)
    if not isinstance(system, Crn):
        raise TypeError(f"cannot simulate {type(system).__name__}")
    if not system.has_constant_rates():
        raise ValueError("network has time-varying rates; simulate it as a bound ReducedSystem")
    if s0.shape != (system.n_species,):
        raise ValueError(f"initial state has shape {s0.shape}, expected ({system.n_species},)")
    kernel = RhsKernel(system)
    return system.names, kernel, s0


def _resolve_trajectory(r: ReducedSystem, binding: TrajectoryInput, y0: np.ndarray):
    driver = binding.driver
    if not driver.has_constant_rates():
        raise ValueError("driver network must have constant rates")
    overlap = set(driver.names) & set(r.base.names)
    if overlap:
        raise ValueError(f"driver and reduced system share species {sorted(overlap)}")
    if y0.shape != (r.base.n_species,):
        raise ValueError(f"initial state has shape {y0.shape}, expected ({r.base.n_species},)")
    nd = driver.n_species
    pick = np.array([driver.index(s) for s in r.inputs], dtype=int)
    dk = RhsKernel(driver)
    rk = RhsKernel(r.base, n_external=len(r.inputs))

    def rhs(s):
        d = s[:nd]
        return np.concatenate([dk(d), rk(s[nd:], d[pick])])

    s0 = np.concatenate([np.asarray(binding.state0, dtype=float), y0])
    return driver.names + r.base.names, rhs, s0


def _sustained_since(times, residuals, tol: float) -> Optional[float]:
    """Start of the final run of samples whose residual stays within ``tol``."""
    since = None
    for t, r in zip(times, residuals):
        if r <= tol:
            if since is None:
                since = t
        else:
            since = None
    return since


def _steady(times, residuals, states, cfg: IntegratorConfig, rhs) -> Optional[SteadyState]:
    since = _sustained_since(times, residuals, cfg.ss_tol)
    if since is None or times[-1] - since < cfg.ss_window:
        return None
    final = np.asarray(states[-1], dtype=float)
    res = float(np.max(np.abs(rhs(final)), initial=0.0))
    if res > cfg.ss_tol:
        return None
    return SteadyState(final.copy(), res, float(since))


def simulate(
    system: System,
    s0,
    cfg: IntegratorConfig = IntegratorConfig(),
    sample_times: Sequence[float] | None = None,
) -> SimulationTrace:
    """Integrate ``system`` from ``s0`` over ``[0, cfg.t_end]``.

    ``s0`` is ordered like the system's species; for a trajectory-bound
    reduced system it covers the reduced species only, the driver starts
    from its binding.

    Raises:
        DomainError: negative initial state.
        MaxStepsExceeded: more than ``cfg.max_steps`` attempted steps.
        StepSizeUnderflow: the step size fell below roundoff level.
    """
    names, rhs, y = resolve(system, s0)
    if np.any(y < 0) or not np.all(np.isfinite(y)):
        raise DomainError("initial state must be finite and nonnegative")
    t_end = cfg.t_end
    if sample_times is None:
        samples = np.linspace(0.0, t_end, cfg.samples)
    else:
        samples = np.asarray(sample_times, dtype=float)
        if samples.ndim != 1 or samples.size == 0 or np.any(np.diff(samples) <= 0):
            raise ValueError("sample times must be a strictly increasing sequence")
        if samples[0] < 0 or samples[-1] > t_end:
            raise ValueError("sample times must lie in [0, t_end]")

    n = y.size
    events: list[Event] = []
    out = np.empty((samples.size, n))
    si = 0
    while si < samples.size and samples[si] == 0.0:
        out[si] = y
        si += 1

    f = rhs(y)
    step_times = [0.0]
    step_res = [float(np.max(np.abs(f), initial=0.0))]
    rtol, atol = cfg.rtol, cfg.atol
    h = _initial_step(rhs, y, f, rtol, atol, t_end)
    t = 0.0
    K = np.empty((7, n))
    n_steps = n_rejected = 0
    attempts = 0

    while t < t_end:
        if attempts >= cfg.max_steps:
            raise MaxStepsExceeded(f"exceeded {cfg.max_steps} steps at t={t}")
        attempts += 1
        h = min(h, t_end - t)
        if h <= 16 * np.finfo(float).eps * max(abs(t), 1.0):
            raise StepSizeUnderflow(f"step size underflow at t={t} (h={h:.3e}); the system may be stiff")
        K[0] = f
        for i in range(1, 6):
            stage = y + h * (_A[i] @ K[:i])
            K[i] = rhs(stage)
        y_new = y + h * (_B @ K[:6])
        K[6] = rhs(y_new)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((h * (_E @ K) / scale) ** 2)))

        if np.any(y_new < -atol):
            n_rejected += 1
            events.append(Event(t, "reject-negative", f"h={h:.3e}"))
            h *= 0.5
            continue
        if not err <= 1.0:
            n_rejected += 1
            h *= max(0.2, 0.9 * err**-0.2) if np.isfinite(err) else 0.2
            continue

        t_new = t_end if t + h >= t_end else t + h
        while si < samples.size and samples[si] <= t_new:
            ts = samples[si]
            if ts == t_new:
                ys = y_new
            else:
                th = (ts - t) / h
                ys = y + h * (K.T @ (_P @ np.array([th, th**2, th**3, th**4])))
            if np.any(ys < 0):
                events.append(Event(float(ts), "sample-clamp", f"min={ys.min():.3e}"))
                ys = np.maximum(ys, 0.0)
            out[si] = ys
            si += 1

        f_new = K[6].copy()
        neg = y_new < 0
        if np.any(neg):
            events.append(Event(t_new, "clamp", f"min={y_new.min():.3e}"))
            y_new = np.where(neg, 0.0, y_new)
            f_new = rhs(y_new)
            if si > 0 and samples[si - 1] == t_new:
                out[si - 1] = y_new
        t, y, f = t_new, y_new, f_new
        n_steps += 1
        step_times.append(t)
        step_res.append(float(np.max(np.abs(f), initial=0.0)))
        factor = 10.0 if err == 0 else min(10.0, max(0.2, 0.9 * err**-0.2))
        h_next = h * factor
        # Keep h * (spectral radius) inside the strongly damped part of the
        # stability region; otherwise deviations of order rtol*|y| from an
        # equilibrium linger instead of decaying.
        rho = _spectral_radius(rhs, y, f)
        if rho > 0:
            h_next = min(h_next, _DAMPED_RADIUS / rho)
        h = h_next

    residuals = np.array([np.max(np.abs(rhs(s)), initial=0.0) for s in out])
    steady = _steady(np.array(step_times), np.array(step_res), out, cfg, rhs)
    if events:
        log.debug("%d integrator events (first: %s)", len(events), events[0])
    return SimulationTrace(names, samples, out, residuals, steady, events, n_steps, n_rejected)


def _spectral_radius(rhs, y, f) -> float:
    """Spectral radius of a forward-difference Jacobian at ``y``."""
    n = y.size
    jac = np.empty((n, n))
    for i in range(n):
        d = np.sqrt(np.finfo(float).eps) * max(abs(y[i]), 1.0)
        yp = y.copy()
        yp[i] += d
        jac[:, i] = (rhs(yp) - f) / d
    return float(np.max(np.abs(np.linalg.eigvals(jac)), initial=0.0))


def _initial_step(rhs, y, f, rtol, atol, t_end) -> float:
    scale = atol + rtol * np.abs(y)
    d0 = np.sqrt(np.mean((y / scale) ** 2)) if y.size else 0.0
    d1 = np.sqrt(np.mean((f / scale) ** 2)) if y.size else 0.0
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t_end)
    f1 = rhs(y + h0 * f)
    d2 = np.sqrt(np.mean(((f1 - f) / scale) ** 2)) / h0 if y.size else 0.0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, t_end)


def detect_steady_state(trace: SimulationTrace, cfg: IntegratorConfig = IntegratorConfig()) -> Optional[SteadyState]:
    """Steady-state record from the sampled residuals of a finished trace.

    Steady means the residual ``max|rhs|`` stays within ``cfg.ss_tol`` from
    some time on, for at least ``cfg.ss_window``; the reported state is the
    last sample.
    """
    since = _sustained_since(trace.times, trace.residuals, cfg.ss_tol)
    if since is None or trace.times[-1] - since < cfg.ss_window:
        return None
    return SteadyState(trace.states[-1].copy(), float(trace.residuals[-1]), float(since))


def check_persistence(trace: SimulationTrace, threshold: float = 1e-3, tail_fraction: float = 0.5) -> dict[str, bool]:
    """Per species: does the tail of the trace stay at or above ``threshold``?"""
    if trace.times.size == 0:
        raise ValueError("empty trace")
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    start = int(np.floor((1 - tail_fraction) * (trace.times.size - 1)))
    tail = trace.states[start:]
    return {name: bool(tail[:, i].min() >= threshold) for i, name in enumerate(trace.names)}


def pseudo_helmholtz(s, s_bar) -> float:
    """``sum(s * (ln s - ln s_bar - 1) + s_bar)``: zero at ``s_bar``, positive elsewhere."""
    s = np.asarray(s, dtype=float)
    s_bar = np.asarray(s_bar, dtype=float)
    if s.shape != s_bar.shape:
        raise ValueError("state and reference have different shapes")
    if np.any(~(s > 0)) or np.any(~(s_bar > 0)):
        raise DomainError("pseudo-Helmholtz function needs strictly positive arguments")
    return float(np.sum(s * (np.log(s) - np.log(s_bar) - 1.0) + s_bar))


def conservation_residual(trace: SimulationTrace, v) -> float:
    """``max_t |v . s(t) - v . s(0)|`` over the samples."""
    v = np.asarray(v, dtype=float)
    if v.shape != (trace.states.shape[1],):
        raise ValueError("conservation vector does not match the trace dimension")
    totals = trace.states @ v
    return float(np.max(np.abs(totals - totals[0])))
