import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import crandn
from leo_hybrid.npa import NpaModel
from leo_hybrid.power import ArchitectureSpec, ComponentPowers
from leo_hybrid.rate import (
    energy_efficiency,
    ergodic_rate_mc,
    rate_terms,
    rate_upper_bound,
    sum_rate_bound,
)

NPA = NpaModel()


def _unit_columns(rng, nt, k):
    V = crandn(rng, nt, k)
    return V / np.linalg.norm(V, axis=0)


def _scalar_terms(B, V, gains, npa):
    """Loop-by-loop expansion of the signal, interference and distortion powers."""
    nt, K = B.shape
    U = [[sum(B[n, k] * np.conj(B[m, k]) for k in range(K)) for m in range(nt)] for n in range(nt)]
    g = [npa.beta1 + 2 * npa.beta3 * U[n][n].real for n in range(nt)]
    sig, itf, dist = [], [], []
    for k in range(K):
        amp = [sum(np.conj(V[n, k]) * g[n] * B[n, l] for n in range(nt)) for l in range(K)]
        sig.append(gains[k] * abs(amp[k]) ** 2)
        itf.append(gains[k] * sum(abs(amp[l]) ** 2 for l in range(K) if l != k))
        d = 0.0
        for n in range(nt):
            for m in range(nt):
                Dnm = 2 * abs(npa.beta3) ** 2 * U[n][m] * U[n][m] * U[m][n]
                d += np.conj(V[n, k]) * Dnm * V[m, k]
        dist.append(gains[k] * d.real)
    return np.array(sig), np.array(itf), np.array(dist)


def test_terms_match_scalar_expansion():
    rng = np.random.default_rng(5)
    for _ in range(5):
        V = _unit_columns(rng, 4, 2)
        B = crandn(rng, 4, 2, scale=0.5)
        gains = rng.uniform(0.5, 2.0, 2)
        got = rate_terms(B, V, gains, NPA)
        want = _scalar_terms(B, V, gains, NPA)
        for a, b in zip(got, want):
            np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)


def test_single_user_matched_filter():
    rng = np.random.default_rng(6)
    v = _unit_columns(rng, 8, 1)
    lin = NPA.linearized()
    gamma, n0, c = 1e-11, 1e-12, 0.3
    r = rate_upper_bound(c * v, v, [gamma], lin, n0)[0]
    assert r.interference == 0 and r.distortion == 0
    assert r.rate_bound == pytest.approx(np.log2(1 + gamma * 2.96**2 * c**2 / n0), rel=1e-12)


def test_zero_precoder_zero_rate():
    rng = np.random.default_rng(7)
    V = _unit_columns(rng, 4, 3)
    assert all(r.rate_bound == 0 for r in rate_upper_bound(np.zeros((4, 3)), V, [1, 1, 1], NPA, 1.0))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), nt=st.integers(2, 8), k=st.integers(1, 3))
def test_breakdown_invariants_and_phase_invariance(seed, nt, k):
    k = min(k, nt)
    rng = np.random.default_rng(seed)
    V = _unit_columns(rng, nt, k)
    B = crandn(rng, nt, k, scale=0.4)
    gains = rng.uniform(0.1, 1.0, k)
    rates = rate_upper_bound(B, V, gains, NPA, 0.1)
    for r in rates:
        assert min(r.signal, r.interference, r.distortion) >= 0
        expect = np.log2(1 + r.signal / (r.interference + r.distortion + r.noise))
        assert r.rate_bound == pytest.approx(expect, rel=1e-12)
    rotated = B * np.exp(1j * rng.uniform(0, 2 * np.pi, k))
    assert sum_rate_bound(rotated, V, gains, NPA, 0.1) == pytest.approx(
        sum(r.rate_bound for r in rates), rel=1e-10)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        rate_terms(np.zeros((4, 2)), np.zeros((4, 3)), [1, 1], NPA)
    with pytest.raises(ValueError):
        rate_terms(np.zeros((4, 2)), np.zeros((4, 2)), [1, 1, 1], NPA)


def test_mc_los_limit_is_deterministic():
    rng = np.random.default_rng(8)
    V = _unit_columns(rng, 6, 2)
    B = crandn(rng, 6, 2, scale=0.3)
    gains = np.array([1e-11, 2e-11])
    mc, se = ergodic_rate_mc(B, V, gains, 1e14, NPA, 1e-12, 2000, rng, return_stderr=True)
    bound = [r.rate_bound for r in rate_upper_bound(B, V, gains, NPA, 1e-12)]
    np.testing.assert_allclose(mc, bound, rtol=1e-6)
    assert np.all(se < 1e-6)


def test_mc_below_bound_and_stderr_scaling():
    rng = np.random.default_rng(9)
    V = _unit_columns(rng, 8, 3)
    B = crandn(rng, 8, 3, scale=0.3)
    gains = np.full(3, 1e-11)
    kappa = 10 ** 1.8
    bound = np.array([r.rate_bound for r in rate_upper_bound(B, V, gains, NPA, 1e-12)])
    mc1, se1 = ergodic_rate_mc(B, V, gains, kappa, NPA, 1e-12, 20000, rng, return_stderr=True)
    mc2, se2 = ergodic_rate_mc(B, V, gains, kappa, NPA, 1e-12, 40000, rng, return_stderr=True)
    assert np.all(mc1 <= bound + 3 * se1)
    np.testing.assert_allclose(se1 / se2, np.sqrt(2), rtol=0.1)


def test_mc_is_seeded_and_partition_independent():
    rng = np.random.default_rng(10)
    V = _unit_columns(rng, 4, 2)
    B = crandn(rng, 4, 2, scale=0.3)
    a = ergodic_rate_mc(B, V, [1e-11, 1e-11], 60.0, NPA, 1e-12, 5000, np.random.default_rng(1))
    b = ergodic_rate_mc(B, V, [1e-11, 1e-11], 60.0, NPA, 1e-12, 5000, np.random.default_rng(1))
    np.testing.assert_array_equal(a, b)


def test_energy_efficiency_properties():
    rng = np.random.default_rng(11)
    V = _unit_columns(rng, 16, 3)
    B = crandn(rng, 16, 3, scale=0.2)
    gains = np.full(3, 1e-11)
    comps = ComponentPowers()
    spec4 = ArchitectureSpec.build("fully_trps", 16, 4)
    spec5 = ArchitectureSpec.build("fully_trps", 16, 5)
    ee = energy_efficiency(B, V, gains, NPA, 1e-12, 0.25e9, spec4, comps)
    assert energy_efficiency(np.zeros_like(B), V, gains, NPA, 1e-12, 0.25e9, spec4, comps) == 0
    assert energy_efficiency(B, V, gains, NPA, 1e-12, 0.5e9, spec4, comps) == pytest.approx(2 * ee)
    assert energy_efficiency(B, V, gains, NPA, 1e-12, 0.25e9, spec5, comps) < ee
