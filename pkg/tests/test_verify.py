import math

import numpy as np
import pytest

from crncompose import (
    IntegratorConfig,
    TrajectoryInput,
    WiringError,
    certify_composable,
    parse_network,
    reduce_mscrc,
    verify_composition_numeric,
    verify_dynamic_computation,
)
from crncompose.corpus import load_builtin
from crncompose.verify import lyapunov_descent_probe

from .oracles import example4_z_limits

X0 = [0.2, 0.3, 0.6, 0.1]


def test_adder_computes_sums(adder):
    report = verify_dynamic_computation(adder, X0, [0, 0], [0.5, 0.7], tol=1e-4)
    assert report.passed and report.status == "pass"
    assert report.max_error < 1e-8


def test_normalizer_symmetric_inputs(normalizer):
    report = verify_dynamic_computation(normalizer, [1, 1], [0.5, 0.5], [0.5, 0.5])
    assert report.passed


def test_normalizer_balance(normalizer):
    z1, z2 = example4_z_limits(0.5, 0.7)
    assert (z1, z2) == (7 / 12, 5 / 12) or math.isclose(z1, 7 / 12)
    report = verify_dynamic_computation(normalizer, [0.5, 0.7], [0.5, 0.5], [float(z1), float(z2)], tol=1e-6)
    assert report.passed


def test_wrong_target_fails(adder):
    report = verify_dynamic_computation(adder, X0, [0, 0], [0.7, 0.5])
    assert not report.passed and report.status == "fail"


def test_oscillator_not_reached(example2):
    report = verify_dynamic_computation(example2, [1.0], [0.5], [1.0])
    assert report.status == "not-reached" and not report.passed


def test_example4_composition(adder, normalizer):
    report = verify_composition_numeric(adder, normalizer, X0, [0, 0], [0.5, 0.5], tol=1e-4)
    assert report.passed
    z1, z2 = example4_z_limits(0.5, 0.7)
    expected = {"Y1": 0.5, "Y2": 0.7, "Z1": float(z1), "Z2": float(z2)}
    for name, value in expected.items():
        assert report.achieved[name] == pytest.approx(value, abs=1e-6)
        assert report.baseline[name] == pytest.approx(value, abs=1e-6)
    assert report.traces["coupled"].steady_state.t_reached < 50


def test_compatibility_class_scaling(adder, normalizer):
    report = verify_composition_numeric(adder, normalizer, X0, [0, 0], [1.0, 1.0])
    z1, z2 = example4_z_limits(0.5, 0.7, total=2)
    assert report.passed
    assert report.achieved["Z1"] == pytest.approx(float(z1), abs=1e-6)
    assert report.achieved["Z2"] == pytest.approx(float(z2), abs=1e-6)


def test_identity_gate(adder):
    idle = parse_network("species Y1 Y2 W\ninputs Y1 Y2")
    report = verify_composition_numeric(adder, idle, X0, [0, 0], [0.3])
    assert report.passed
    assert report.achieved["W"] == pytest.approx(0.3)


def test_swapped_wiring_gives_text_normalization(adder):
    swapped = load_builtin("normalizer_swapped")
    report = verify_composition_numeric(adder, swapped, X0, [0, 0], [0.5, 0.5])
    assert report.passed
    assert report.achieved["Z1"] == pytest.approx(0.5 / 1.2, abs=1e-6)


def test_bad_wiring_raises(adder):
    with pytest.raises(WiringError):
        verify_composition_numeric(adder, adder, X0, [0, 0], [0, 0])


def test_baseline_independent_of_start_in_class(adder, normalizer):
    a = verify_composition_numeric(adder, normalizer, X0, [0, 0], [0.9, 0.1])
    b = verify_composition_numeric(adder, normalizer, X0, [0, 0], [0.2, 0.8])
    for s in ("Z1", "Z2"):
        assert a.baseline[s] == pytest.approx(b.baseline[s], abs=1e-6)


@pytest.mark.parametrize("scale", [0.5, 3.0, 10.0])
def test_z_limits_scale_invariant(adder, normalizer, scale):
    base = verify_composition_numeric(adder, normalizer, X0, [0, 0], [0.5, 0.5])
    scaled = verify_composition_numeric(adder, normalizer, [scale * x for x in X0], [0, 0], [0.5, 0.5])
    for s in ("Z1", "Z2"):
        assert scaled.achieved[s] == pytest.approx(base.achieved[s], abs=1e-6)


def test_certified_pairs_verify(adder, normalizer):
    for c2 in (normalizer, load_builtin("normalizer_swapped")):
        assert certify_composable(adder, c2).certified
        assert verify_composition_numeric(adder, c2, X0, [0, 0], [0.5, 0.5]).passed


def _probe(adder, normalizer, z0):
    reduced = reduce_mscrc(normalizer).bind(TrajectoryInput(adder.crn, (0.2, 0.3, 0.6, 0.1, 0.0, 0.0)))
    return lyapunov_descent_probe(reduced, [7 / 12, 5 / 12], z0, eta=1e-6)


def test_probe_example4(adder, normalizer):
    probe = _probe(adder, normalizer, [0.5, 0.5])
    assert probe.settle_time is not None and probe.settle_time < 20
    assert probe.descent_after_settle
    assert probe.descent_from <= 10
    assert probe.outcome == "converged" and probe.persistent


def test_probe_boundary_start(adder, normalizer):
    probe = _probe(adder, normalizer, [0.0, 1.0])
    assert math.isnan(probe.values[0])
    assert probe.persistent and probe.outcome == "converged"


def test_probe_at_equilibrium_is_flat(normalizer):
    from crncompose import FrozenInput

    reduced = reduce_mscrc(normalizer).bind(FrozenInput((0.5, 0.7)))
    probe = lyapunov_descent_probe(reduced, [7 / 12, 5 / 12], [7 / 12, 5 / 12], cfg=IntegratorConfig(t_end=10.0))
    assert np.nanmax(np.abs(probe.values)) < 1e-14
    assert probe.outcome == "converged"


def test_probe_detects_boundary():
    driver = parse_network("species U\nU -> 2 U ; k=0.01")
    gate = parse_network("species U A B\ninputs U\nU + A -> U + B ; k=1")
    reduced = reduce_mscrc(gate).bind(TrajectoryInput(driver, (1.0,)))
    probe = lyapunov_descent_probe(reduced, [1e-9, 1.0], [1.0, 0.0], cfg=IntegratorConfig(t_end=40.0))
    assert not probe.persistent and probe.outcome == "boundary"
