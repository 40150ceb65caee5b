import json
import math
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bandgap_qed import (AtomicConfiguration, DensityMatrix, ModelParams, basis_dimension,
                         enumerate_basis, sample_configuration, sample_configurations,
                         sample_poisson, uniform_stream)


def test_params_defaults_and_validation():
    p = ModelParams()
    assert p.gamma_prime == 1.0 and p.gamma_1d == 0.3 and math.isinf(p.L_over_d)
    for bad in (dict(V=-1), dict(L_over_d=0), dict(gamma_1d=-0.1), dict(omega=-1),
                dict(gamma_prime=-1), dict(V=float("nan"))):
        with pytest.raises(ValueError):
            ModelParams(**bad)


def test_params_dict_round_trip_with_infinite_range():
    p = ModelParams(V=2.5, omega=0.02)
    d = p.to_dict()
    assert d["L_over_d"] == "inf"
    assert ModelParams.from_dict(json.loads(json.dumps(d))) == p


def test_configuration_validation_and_json():
    c = AtomicConfiguration((0, 3, 7), 10)
    assert c.n == 3 and list(c.theta) == [0, 3, 7]
    assert AtomicConfiguration.from_json(c.to_json()) == c
    assert json.loads(c.to_json()) == {"N": 10, "n": 3, "sites": [0, 3, 7]}
    for sites, N in (((3, 3), 10), ((4, 2), 10), ((0, 10), 10), ((-1,), 10)):
        with pytest.raises(ValueError):
            AtomicConfiguration(sites, N)
    with pytest.raises(ValueError):
        AtomicConfiguration.from_json('{"N": 5, "n": 2, "sites": [1]}')
    assert AtomicConfiguration((), 5).n == 0


@given(st.integers(0, 12), st.data())
def test_basis_dimension_and_order(n, data):
    m = data.draw(st.integers(0, n))
    b = enumerate_basis(n, m)
    assert b.dim == sum(comb(n, k) for k in range(m + 1)) == basis_dimension(n, m)
    exc = b.excitations
    assert np.all(np.diff(exc) >= 0)
    for k in range(m + 1):
        block = b.states[b.sector(k)]
        assert list(block) == sorted(block)
        assert all(len(s) == k for s in block)
    masks = b.masks
    assert len(set(masks.tolist())) == b.dim
    for s, mask in zip(b.states, masks):
        assert mask == sum(1 << j for j in s)
        assert b.state_index(s) == b.states.index(s)


def test_basis_rejects_bad_truncation():
    with pytest.raises(ValueError):
        enumerate_basis(3, 4)


def test_uniform_stream_is_counter_based():
    full = uniform_stream(11, 20)
    assert np.array_equal(full[5:], uniform_stream(11, 15, offset=5))
    assert np.all((full >= 0) & (full < 1))
    assert not np.array_equal(full, uniform_stream(12, 20))


def test_uniform_stream_reference_value():
    # splitmix64 finalizer applied to mix(seed) + (i + 1) * golden ratio constant
    mask = (1 << 64) - 1

    def mix(z):
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        return z ^ (z >> 31)

    key = mix(42)
    expect = [(mix((key + (i + 1) * 0x9E3779B97F4A7C15) & mask) >> 11) / 2.0 ** 53 for i in range(4)]
    assert np.array_equal(uniform_stream(42, 4), np.array(expect))


@given(st.integers(1, 60), st.data(), st.integers(0, 2 ** 40))
@settings(max_examples=60)
def test_sampled_configuration_is_sorted_subset(N, data, seed):
    n = data.draw(st.integers(1, N))
    c = sample_configuration(N, n, seed)
    assert c.n == n and len(set(c.sites)) == n
    assert 0 <= c.sites[0] and c.sites[-1] < N
    assert c == sample_configuration(N, n, seed)


def test_batch_sampling_matches_single_draws():
    batch = sample_configurations(100, 7, 500, 25)
    assert batch == [sample_configuration(100, 7, 500 + i) for i in range(25)]


def test_sampling_is_uniform_over_sites():
    counts = np.zeros(20)
    for c in sample_configurations(20, 5, 0, 4000):
        counts[list(c.sites)] += 1
    expected = 4000 * 5 / 20
    chi2 = np.sum((counts - expected) ** 2 / expected)
    assert chi2 < 45  # 19 degrees of freedom, far tail


def test_full_lattice_and_bad_counts():
    assert sample_configuration(6, 6, 3).sites == tuple(range(6))
    with pytest.raises(ValueError):
        sample_configuration(5, 6, 0)


def test_poisson_sampling_statistics():
    draws = np.array([sample_poisson(4.0, s) for s in range(4000)])
    assert draws.min() >= 0
    assert abs(draws.mean() - 4.0) < 0.15
    assert abs(draws.var() - 4.0) < 0.4
    with pytest.raises(ValueError):
        sample_poisson(0.0, 1)


def test_density_matrix_checks():
    b = enumerate_basis(2, 1)
    rho = np.diag([0.5, 0.25, 0.25]).astype(complex)
    dm = DensityMatrix(b, rho)
    dm.check()
    assert np.allclose(dm.populations(), [0.5, 0.5])
    bad = rho.copy()
    bad[0, 1] = bad[1, 0] = 0.6  # Hermitian, unit trace, positive diagonal, not positive
    with pytest.raises(ValueError):
        DensityMatrix(b, bad).check()
    with pytest.raises(ValueError):
        DensityMatrix(b, 2 * rho).check()
