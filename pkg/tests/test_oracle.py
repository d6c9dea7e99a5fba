"""Truncated-bath oracle: discretization, engines, fits, verification."""

import numpy as np
import pytest
import scipy.integrate

from resodec.errors import (
    DimensionTooLarge,
    PoorFit,
    TruncationWarning,
    WeightMismatch,
)
from resodec.model import FormFactor, build_system
from resodec.dynamics import Trajectory, free_evolution, single_qubit_spec
from resodec.oracle import (
    TruncatedBath,
    VerifyConfig,
    dephasing_envelope,
    discretize_bath,
    exact_evolve,
    fit_decay,
    verify,
)

FF = FormFactor(radial_exponent=0.5, decay_exponent=2)


def plus_state(n=2):
    v = np.ones(n, dtype=complex) / np.sqrt(n)
    return np.outer(v, v.conj())


def tiny_bath(beta=30.0, cutoff=2):
    return TruncatedBath(mode_frequencies=np.array([1.0]),
                         mode_couplings=np.array([0.3]),
                         fock_cutoff=cutoff, beta=beta)


# =====================================================================
# Bath container and discretization
# =====================================================================

def test_truncated_bath_validation():
    with pytest.raises(ValueError):
        TruncatedBath(mode_frequencies=np.array([0.0, 1.0]),
                      mode_couplings=np.array([0.1, 0.1]),
                      fock_cutoff=2, beta=1.0)
    with pytest.raises(ValueError):
        TruncatedBath(mode_frequencies=np.array([1.0]),
                      mode_couplings=np.array([0.1, 0.2]),
                      fock_cutoff=2, beta=1.0)
    with pytest.raises(ValueError):
        TruncatedBath(mode_frequencies=np.array([1.0]),
                      mode_couplings=np.array([0.1]),
                      fock_cutoff=0, beta=1.0)
    with pytest.raises(ValueError):
        TruncatedBath(mode_frequencies=np.array([1.0]),
                      mode_couplings=np.array([0.1]),
                      fock_cutoff=2, beta=0.0)


def test_bath_thermal_quantities():
    bath = TruncatedBath(mode_frequencies=np.array([0.5, 1.25]),
                         mode_couplings=np.array([0.2, 0.1]),
                         fock_cutoff=3, beta=2.0)
    assert np.allclose(bath.occupancies(),
                       1.0 / np.expm1(2.0 * np.array([0.5, 1.25])))
    assert np.isclose(bath.recurrence_time, 2.0 * np.pi / 0.75)
    assert tiny_bath().recurrence_time == np.inf
    assert np.isclose(bath.truncation_tail(), np.exp(-2.0 * 0.5 * 4))


def test_discretize_bath_midpoint_rule():
    from resodec.reservoir import one_sided_density
    bath = discretize_bath(FF, beta=2.0, n_modes=200, omega_max=2.0,
                           fock_cutoff=3)
    step = 2.0 / 200
    assert np.allclose(bath.mode_frequencies,
                       (np.arange(200) + 0.5) * step)
    assert np.allclose(bath.mode_couplings ** 2,
                       one_sided_density(FF, bath.mode_frequencies) * step)
    target, _ = scipy.integrate.quad(
        lambda w: float(one_sided_density(FF, w)), 0.0, 2.0)
    total = float(np.sum(bath.mode_couplings ** 2))
    assert abs(total - target) <= 0.01 * target


def test_discretize_bath_refuses_coarse_grid():
    with pytest.raises(WeightMismatch):
        discretize_bath(FF, beta=2.0, n_modes=4, omega_max=3.0,
                        fock_cutoff=3)
    with pytest.raises(ValueError):
        discretize_bath(FF, beta=2.0, n_modes=0, omega_max=3.0,
                        fock_cutoff=3)


# =====================================================================
# Engines
# =====================================================================

def test_dense_and_sector_engines_agree():
    spec = single_qubit_spec(a=0.0, b=0.0, c=1.0, delta=1.0, g=FF,
                             beta=30.0, lam=0.05)
    bath = tiny_bath()
    times = np.linspace(0.0, 20.0, 41)
    dense = exact_evolve(spec, bath, plus_state(), times, method="dense")
    sector = exact_evolve(spec, bath, plus_state(), times, method="sector")
    assert np.max(np.abs(dense.states - sector.states)) <= 1e-10
    with pytest.raises(ValueError):
        exact_evolve(spec, bath, plus_state(), times, method="magic")


def test_sector_engine_nonuniform_grid():
    spec = single_qubit_spec(a=0.0, b=0.0, c=1.0, delta=1.0, g=FF,
                             beta=30.0, lam=0.05)
    bath = tiny_bath()
    times = np.array([0.0, 0.7, 1.1, 3.0, 9.5])
    dense = exact_evolve(spec, bath, plus_state(), times, method="dense")
    sector = exact_evolve(spec, bath, plus_state(), times, method="sector")
    assert np.max(np.abs(dense.states - sector.states)) <= 1e-10


def test_dephasing_envelope_matches_dense_engine():
    G = np.diag([0.8, -0.5]).astype(complex)
    strength = 0.1
    spec = build_system([0.0, 1.3], [(strength, G, FF)], beta=4.0)
    bath = TruncatedBath(mode_frequencies=np.array([0.7, 1.3]),
                         mode_couplings=np.array([0.4, 0.25]),
                         fock_cutoff=3, beta=4.0)
    times = np.linspace(0.0, 15.0, 31)
    traj = exact_evolve(spec, bath, plus_state(), times, method="dense")

    envelope = dephasing_envelope(bath, strength * 0.8, strength * -0.5,
                                  times)
    want = 0.5 * np.exp(-1.3j * times) * envelope
    assert np.max(np.abs(traj.element(0, 1) - want)) <= 1e-12
    # dephasing leaves populations exactly constant
    pops = traj.states[:, [0, 1], [0, 1]].real
    assert np.max(np.abs(pops - pops[0])) <= 1e-12


def test_zero_coupling_follows_free_evolution():
    spec = single_qubit_spec(a=0.0, b=0.0, c=1.0, delta=1.0, g=FF,
                             beta=2.0, lam=0.0)
    times = np.linspace(0.0, 5.0, 21)
    traj = exact_evolve(spec, tiny_bath(), plus_state(), times)
    free = free_evolution(spec, plus_state(), times)
    assert np.array_equal(traj.states, free.states)


def test_truncation_warning_for_hot_bath():
    spec = single_qubit_spec(a=0.0, b=0.0, c=1.0, delta=1.0, g=FF,
                             beta=0.1, lam=0.01)
    bath = TruncatedBath(mode_frequencies=np.array([1.0]),
                         mode_couplings=np.array([0.1]),
                         fock_cutoff=1, beta=0.1)
    with pytest.warns(TruncationWarning):
        exact_evolve(spec, bath, plus_state(), [0.0, 1.0], method="dense")


def test_dimension_guards():
    spec = single_qubit_spec(a=0.0, b=0.0, c=1.0, delta=1.0, g=FF,
                             beta=30.0, lam=0.01)
    big = TruncatedBath(mode_frequencies=np.linspace(0.5, 2.5, 9),
                        mode_couplings=np.full(9, 0.1),
                        fock_cutoff=3, beta=30.0)
    with pytest.raises(DimensionTooLarge):
        exact_evolve(spec, big, plus_state(), [0.0, 1.0], method="dense")

    warm_spec = single_qubit_spec(a=0.0, b=0.0, c=1.0, delta=1.0, g=FF,
                                  beta=0.5, lam=0.01)
    warm = TruncatedBath(mode_frequencies=np.array([0.5, 1.0]),
                         mode_couplings=np.array([0.1, 0.1]),
                         fock_cutoff=3, beta=0.5)
    with pytest.warns(TruncationWarning):
        with pytest.raises(DimensionTooLarge):
            exact_evolve(warm_spec, warm, plus_state(), [0.0, 1.0],
                         method="sector")


# =====================================================================
# Decay fitting
# =====================================================================

def synthetic_trajectory(times, rate=0.1, freq=1.0, asymptote=0.05,
                         noise=None):
    y = 0.6 * np.exp((1j * freq - rate) * times) + asymptote
    if noise is not None:
        y = asymptote + (y - asymptote) * noise
    states = np.zeros((len(times), 2, 2), dtype=complex)
    states[:, 0, 1] = y
    states[:, 1, 0] = np.conj(y)
    states[:, 0, 0] = states[:, 1, 1] = 0.5
    return Trajectory(times=times, states=states,
                      ergodic_mean=np.diag([0.5, 0.5]).astype(complex))


def test_fit_decay_recovers_rate_and_frequency():
    # the asymptote is estimated from the tail average, which leaves a
    # small bias, so the recovery is good to ~0.5% rather than exact
    times = np.linspace(0.0, 60.0, 201)
    fit = fit_decay(synthetic_trajectory(times), (0, 1))
    assert np.isclose(fit.rate, 0.1, rtol=5e-3)
    assert np.isclose(fit.frequency, 1.0, rtol=5e-3)
    assert fit.residual <= 0.05
    assert fit.window[0] == 0.0


def test_fit_decay_constant_element_gives_zero_rate():
    times = np.linspace(0.0, 60.0, 201)
    fit = fit_decay(synthetic_trajectory(times, rate=0.0, freq=0.0,
                                         asymptote=0.0), (0, 0))
    assert fit.rate == 0.0 and fit.frequency == 0.0


def test_fit_decay_failure_modes():
    short = np.linspace(0.0, 5.0, 10)
    with pytest.raises(PoorFit, match="at least 20"):
        fit_decay(synthetic_trajectory(short), (0, 1))

    shallow = np.linspace(0.0, 10.0, 61)
    with pytest.raises(PoorFit, match="e-folds"):
        fit_decay(synthetic_trajectory(shallow, rate=0.001), (0, 1))

    times = np.linspace(0.0, 60.0, 201)
    wobble = np.exp(0.5 * np.sin(7.3 * times))
    with pytest.raises(PoorFit, match="log-residual"):
        fit_decay(synthetic_trajectory(times, noise=wobble), (0, 1))


# =====================================================================
# Verification orchestrator
# =====================================================================

def test_verify_passes_on_resolved_benchmark():
    g = FormFactor(radial_exponent=0.5, decay_exponent=2,
                   overall_scale=5.0)
    spec = single_qubit_spec(a=0.0, b=0.0, c=1.0, delta=1.0, g=g,
                             beta=30.0, lam=0.02)
    cfg = VerifyConfig(n_modes=110, omega_max=3.0, fock_cutoff=3,
                       lambdas=(0.016,), num_times=101)
    report = verify(spec, cfg)
    assert report.passed
    names = [c.name for c in report.checks]
    assert "lambda=0.016:trajectory" in names
    assert "lambda=0.016:rate(0,1)" in names
    assert "lambda=0.016:ergodic" in names
    assert report.lines()[-1] == "overall: PASS"


def test_verify_flags_coarse_bath():
    spec = single_qubit_spec(a=0.0, b=0.0, c=1.0, delta=1.0, g=FF,
                             beta=2.0, lam=0.02)
    report = verify(spec, VerifyConfig(n_modes=5, omega_max=3.0,
                                       num_times=21))
    assert not report.passed
    assert report.checks[0].name == "bath-discretization"
    assert "FAIL" in report.lines()[0]


def test_verify_config_validation():
    with pytest.raises(ValueError):
        VerifyConfig(n_modes=0)
    with pytest.raises(ValueError):
        VerifyConfig(num_times=10)
