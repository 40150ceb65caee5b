import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bandgap_qed import (AtomicConfiguration, ModelParams, anharmonicity, bandgap_matrix,
                         build_nonhermitian, lindblad_decomposition, max_resonance, resonances,
                         sample_configuration, two_excitation_max)
from bandgap_qed.io import dump_matrix, load_matrix

from oracles import brute_hamiltonian


@pytest.mark.parametrize("L", [math.inf, 3.0])
@pytest.mark.parametrize("m", [1, 2, 4])
def test_hamiltonian_matches_tensor_product_oracle(L, m):
    cfg = AtomicConfiguration((1, 2, 6, 9), 12)
    p = ModelParams(V=2.0, L_over_d=L, omega=0.7, delta=0.4, gamma_1d=0.45)
    H = build_nonhermitian(cfg, p, m).dense()
    assert np.allclose(H, brute_hamiltonian(cfg.sites, p, m), atol=1e-13)


@given(st.integers(0, 10 ** 6), st.integers(1, 5), st.sampled_from([math.inf, 2.0, 50.0]))
@settings(max_examples=25, deadline=None)
def test_lindblad_reconstruction(seed, n, L):
    cfg = sample_configuration(15, n, seed)
    p = ModelParams(V=3.0, L_over_d=L, omega=0.9, delta=-0.2)
    m = min(n, 3)
    ls = lindblad_decomposition(cfg, p, m)
    H = build_nonhermitian(cfg, p, m).dense()
    herm = ls.coherent.dense()
    assert np.allclose(herm, herm.conj().T)
    assert np.allclose(ls.effective_hamiltonian(), H, atol=1e-12)


def test_zero_rates_drop_jumps():
    cfg = AtomicConfiguration((0, 1), 4)
    ls = lindblad_decomposition(cfg, ModelParams(gamma_prime=0.0, gamma_1d=0.0), 2)
    assert ls.jumps == ()


@given(st.integers(0, 10 ** 6), st.integers(1, 20))
@settings(max_examples=40)
def test_rank_one_limit(seed, n):
    cfg = sample_configuration(200, n, seed)
    w = resonances(cfg, 4.0, math.inf)
    assert abs(w[0] - 4.0 * n) <= 1e-10 * 4.0 * n
    assert np.all(np.abs(w[1:]) <= 1e-10 * 4.0 * n)
    mr = max_resonance(cfg, 4.0, math.inf)
    assert mr.omega == 4.0 * n
    if n >= 2:
        assert abs(anharmonicity(cfg, 4.0, math.inf) + 8.0) < 1e-9


def test_max_resonance_finite_range_is_eigenpair():
    cfg = sample_configuration(100, 8, 3)
    M = bandgap_matrix(cfg, 4.0, 20.0)
    mr = max_resonance(cfg, 4.0, 20.0)
    assert np.allclose(M @ mr.vector, mr.omega * mr.vector)
    assert mr.vector[np.flatnonzero(np.abs(mr.vector) > 1e-12)[0]] > 0
    assert not mr.degenerate


def test_two_atoms_by_hand():
    # theta = (0, 1), L infinite: M = V [[1, -1], [-1, 1]], two-excitation energy 2V
    cfg = AtomicConfiguration((0, 1), 5)
    assert np.allclose(resonances(cfg, 3.0, math.inf), [6.0, 0.0])
    assert two_excitation_max(cfg, 3.0, math.inf) == pytest.approx(6.0)
    assert anharmonicity(cfg, 3.0, math.inf) == pytest.approx(-6.0)


def test_errors():
    with pytest.raises(ValueError):
        max_resonance(AtomicConfiguration((), 3), 1.0, math.inf)
    with pytest.raises(ValueError):
        anharmonicity(AtomicConfiguration((1,), 3), 1.0, math.inf)
    with pytest.raises(ValueError):
        build_nonhermitian(AtomicConfiguration((1,), 3), ModelParams(), 2)


def test_sparse_above_dense_limit():
    cfg = sample_configuration(200, 40, 0)
    op = build_nonhermitian(cfg, ModelParams(omega=0.01), 2)
    assert op.basis.dim == 1 + 40 + 780
    assert hasattr(op.matrix, "tocsr")


def test_matrix_dump_round_trip(tmp_path):
    cfg = AtomicConfiguration((0, 3, 4), 8)
    op = build_nonhermitian(cfg, ModelParams(omega=0.5, L_over_d=4.0), 2)
    bin_path, json_path = dump_matrix(tmp_path / "H", op)
    assert bin_path.stat().st_size == op.basis.dim ** 2 * 16
    assert np.array_equal(load_matrix(tmp_path / "H"), op.dense())
