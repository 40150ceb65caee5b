import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bandgap_qed import (AtomicConfiguration, CapacityError, ModelParams, evolve_master, max_p1,
                         p1_peak, sample_configuration, search_configuration, steady_density,
                         sweep_p1, transmission_spectrum, two_level_max_inversion)
from bandgap_qed import _lindblad
from bandgap_qed._lindblad import integrate, ground_state_density, time_maximum, LindbladRHS
from bandgap_qed.master import flux_from_density, liouvillian, overlap_distance
from bandgap_qed.hamiltonian import lindblad_decomposition


def _dense_rhs(config, params, m):
    """Liouvillian from the explicit jump list, independent of the index-map shortcut."""
    ls = lindblad_decomposition(config, params, m)
    return LindbladRHS(ls.effective_hamiltonian(), ls.jumps)


def test_liouvillian_matches_dense_jump_form():
    cfg = AtomicConfiguration((0, 1, 4), 6)
    p = ModelParams(V=2.0, L_over_d=5.0, omega=1.3, delta=0.7)
    rng = np.random.default_rng(1)
    A = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = A @ A.conj().T
    assert np.allclose(liouvillian(cfg, p, 3).apply(rho), _dense_rhs(cfg, p, 3).apply(rho), atol=1e-12)


@pytest.mark.parametrize("superop_max_dim", [0, 24], ids=["lawson", "exact"])
def test_lawson_matches_adaptive_reference(monkeypatch, superop_max_dim):
    monkeypatch.setattr(_lindblad, "SUPEROP_MAX_DIM", superop_max_dim)
    cfg = AtomicConfiguration((0, 3, 4), 8)
    p = ModelParams(V=5.0, omega=2.0, delta=14.0)
    rhs = liouvillian(cfg, p, 3)
    t = np.linspace(0, 1.0, 11)
    a = integrate(rhs, ground_state_density(8), t)
    b = integrate(rhs, ground_state_density(8), t, method="dop853", rtol=1e-12, atol=1e-14)
    assert np.max(np.abs(a - b)) < 1e-6


@given(st.integers(0, 10 ** 6), st.integers(1, 4), st.floats(0.1, 3.0), st.floats(-3, 3))
@settings(max_examples=20, deadline=None)
def test_density_matrix_stays_physical(seed, n, omega, delta):
    cfg = sample_configuration(12, n, seed)
    p = ModelParams(V=2.0, L_over_d=4.0, omega=omega, delta=delta)
    traj = evolve_master(cfg, p, np.linspace(0, 2, 5), keep_states=True)
    for rho in traj.states:
        assert abs(np.trace(rho) - 1) < 1e-8
        assert np.allclose(rho, rho.conj().T, atol=1e-12)
        assert np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() > -1e-9


def test_lossless_single_atom_rabi():
    cfg = AtomicConfiguration((3,), 6)
    p = ModelParams(V=4.0, gamma_prime=0.0, gamma_1d=0.0, omega=1.5, delta=4.0)
    t = np.linspace(0, 2, 21)
    traj = evolve_master(cfg, p, t)
    assert np.allclose(traj.p(1), np.sin(1.5 * t) ** 2, atol=1e-9)
    pk = p1_peak(cfg, p, horizon=1.5, patience=None)
    assert pk.p1 == pytest.approx(1.0, abs=1e-8)
    assert pk.time == pytest.approx(math.pi / 3.0, abs=1e-4)


def test_single_atom_matches_two_level_oracle():
    cfg = AtomicConfiguration((0,), 4)
    p = ModelParams(V=1.0, omega=2.0, delta=1.4)
    # single atom: resonance at V, decay Gamma' + Gamma_1D, detuning from resonance 0.4
    expect = two_level_max_inversion(2.0, 0.4, 1.3)
    assert max_p1(cfg, p) == pytest.approx(expect, abs=1e-6)


def test_weak_drive_transmission_agrees_with_master_equation():
    for sites, delta in (((0, 3), 0.5), ((1, 2, 5), 8.0), ((2,), 4.0)):
        cfg = AtomicConfiguration(sites, 8)
        p = ModelParams(V=4.0, omega=0.001, delta=delta)
        rho = steady_density(cfg, p, len(sites))
        rho.check()
        T_master = flux_from_density(rho, cfg, p, "T") / p.omega ** 2
        T_wave = transmission_spectrum(cfg, p, [delta]).T[0]
        assert T_master == pytest.approx(T_wave, abs=1e-3)


def test_capacity_guard():
    cfg = sample_configuration(100, 30, 0)
    with pytest.raises(CapacityError):
        evolve_master(cfg, ModelParams(omega=1.0), [0.0, 0.1], max_excitations=2)


def test_time_maximum_finds_global_peak():
    # two-level system: the first peak is the largest for damped Rabi oscillation
    H = np.array([[0, 3.0], [3.0, -0.5j]], dtype=complex)
    rhs = LindbladRHS(H, [np.array([[0, 1.0], [0, 0]])])
    res = time_maximum(rhs, ground_state_density(2), [0, 1], horizon=10)
    fine = integrate(rhs, ground_state_density(2), np.linspace(0, 2, 20001), max_step=1e-4)
    assert res.value == pytest.approx(np.real(fine[:, 1, 1]).max(), abs=1e-7)
    assert res.stopped_early


def test_sweep_surface_consistency():
    cfg = AtomicConfiguration((0, 2), 6)
    p = ModelParams(V=3.0, omega=1.0)
    s = sweep_p1(cfg, p, [0.5, 1.0], [-0.5, 0.0, 0.5], horizon=6)
    assert s.values.shape == (2, 3)
    om, dm, v = s.optimum
    assert v == s.values.max()
    assert v == pytest.approx(max_p1(cfg, p.replace(omega=om, delta=s.omega_max + dm), horizon=6))


def test_search_configuration_is_best_of_trials():
    res = search_configuration(4, 30, 0.3, 500, 11)
    dists = [overlap_distance(sample_configuration(30, 4, 11 + t), math.pi / 2, 0.3)
             for t in range(500)]
    assert res.distance == pytest.approx(min(dists), abs=1e-12)
    assert res.config == sample_configuration(30, 4, 11 + res.trial)
    assert overlap_distance(res.config, math.pi / 2, 0.3) == pytest.approx(res.distance, abs=1e-12)
