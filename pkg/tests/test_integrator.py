import math

import numpy as np
import pytest

from quditbloch import BlochState, Constant, FieldSpec, FieldTerm, SystemSpec
from quditbloch.dynamics import compile_generator
from quditbloch.integrator import (
    IntegrationConfig,
    NumericalError,
    StepSizeUnderflow,
    integrate,
    rk4_step,
    sample_times,
)

ONE = SystemSpec.of("1/2")


def _larmor(w=1.0):
    field = FieldSpec((FieldTerm((3,), Constant(w)),))
    return field, compile_generator(ONE, field)


@pytest.mark.parametrize("kwargs", [
    {"dt": 0.0}, {"dt": -1e-3}, {"t0": 1.0, "t1": 1.0}, {"sample_every": 0},
    {"rtol": 0.0}, {"method": "euler"},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        IntegrationConfig(**kwargs)


def test_sample_grid():
    cfg = IntegrationConfig(dt=0.1, t1=1.0, sample_every=3)
    steps, times = sample_times(cfg)
    assert steps == [0, 3, 6, 9, 10]
    assert times[-1] == 1.0
    assert np.all(np.diff(times) > 0)


def test_rk4_step_exact_on_cubic():
    # y' = 3 t^2 is integrated exactly by a fourth-order rule
    y = rk4_step(lambda y, t: np.array([3 * t * t]), np.array([0.0]), 0.0, 0.5)
    assert y[0] == pytest.approx(0.125, abs=1e-16)


def test_zero_rhs_constant():
    init = BlochState(ONE, [1, 0.3, 0.4, 0.5])
    traj = integrate(lambda R, t: np.zeros_like(R), init, IntegrationConfig(dt=0.1, t1=2.0))
    assert np.all(traj.states == init.R)


def test_larmor_precession():
    field, gen = _larmor(1.0)
    init = BlochState(ONE, [1, 0.6, 0.0, 0.8])
    cfg = IntegrationConfig(dt=1e-3, t1=10.0, sample_every=100)
    traj = integrate(gen, init, cfg, field=field)
    assert np.max(np.abs(traj.states[:, 3] - 0.8)) <= 1e-12
    radius = np.hypot(traj.states[:, 1], traj.states[:, 2])
    assert np.max(np.abs(radius - 0.6)) <= 1e-10
    # rotation rate h/2 about z
    t = traj.times
    assert np.allclose(traj.states[:, 1], 0.6 * np.cos(t / 2), atol=1e-10)
    assert np.allclose(traj.states[:, 2], 0.6 * np.sin(t / 2), atol=1e-10)
    assert set(traj.monitors) == {"bloch_length", "purity", "energy", "min_eig"}
    assert traj.drift("bloch_length") <= 1e-10


def test_energy_monitor_requires_field():
    _, gen = _larmor()
    traj = integrate(gen, BlochState(ONE, [1, 1, 0, 0]), IntegrationConfig(dt=0.01, t1=0.1))
    assert "energy" not in traj.monitors


def test_deterministic():
    field, gen = _larmor(1.3)
    init = BlochState(ONE, [1, 0.1, 0.2, 0.3])
    cfg = IntegrationConfig(dt=1e-2, t1=3.0, sample_every=7)
    a = integrate(gen, init, cfg, field=field)
    b = integrate(gen, init, cfg, field=field)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.times, b.times)


def test_rk4_fourth_order_against_exact_rotation():
    field, gen = _larmor(2.0)
    init = BlochState(ONE, [1, 1.0, 0.0, 0.0])
    errs = []
    for dt in (0.1, 0.05, 0.025):
        traj = integrate(gen, init, IntegrationConfig(dt=dt, t1=10.0), field=field)
        exact = np.cos(traj.times)
        errs.append(np.max(np.abs(traj.states[:, 1] - exact)))
    for a, b in zip(errs, errs[1:]):
        assert 12 <= a / b <= 20


def test_adaptive_method():
    field, gen = _larmor(1.0)
    init = BlochState(ONE, [1, 1.0, 0.0, 0.0])
    cfg = IntegrationConfig(method="rk45", dt=0.5, t1=10.0, rtol=1e-10, atol=1e-12)
    traj = integrate(gen, init, cfg, field=field)
    assert np.allclose(traj.times, np.arange(0, 10.01, 0.5))
    assert np.max(np.abs(traj.states[:, 1] - np.cos(traj.times / 2))) <= 1e-8


def test_adaptive_step_underflow():
    # y' = y^2 from y(0) = 1 blows up at t = 1
    def singular(R, t):
        out = np.zeros_like(R)
        out[1] = R[1] ** 2
        return out

    init = BlochState(ONE, [1, 1.0, 0, 0])
    cfg = IntegrationConfig(method="rk45", dt=0.5, t1=2.0)
    with pytest.raises(StepSizeUnderflow):
        integrate(singular, init, cfg)
    assert issubclass(StepSizeUnderflow, NumericalError)


def test_nan_aborts_fixed_step():
    def bad(R, t):
        return np.full_like(R, math.nan) if t > 0.05 else np.zeros_like(R)

    with pytest.raises(NumericalError, match="non-finite"):
        integrate(bad, BlochState(ONE, [1, 0, 0, 0]), IntegrationConfig(dt=0.01, t1=1.0))


def test_shape_mismatch():
    with pytest.raises(ValueError):
        integrate(lambda R, t: np.zeros(2), BlochState(ONE, [1, 0, 0, 0]), IntegrationConfig(dt=0.1, t1=1.0))


def test_trajectory_states_keep_anchor():
    field, gen = _larmor(1.0)
    traj = integrate(gen, BlochState(ONE, [1, 0.5, 0.5, 0.5]), IntegrationConfig(dt=0.01, t1=1.0, sample_every=10),
                     field=field)
    assert np.all(traj.states[:, 0] == 1.0)
    assert traj.state(3).R[0] == 1.0
    assert len(traj) == 11
