import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import crandn
from leo_hybrid.npa import (
    NpaDomainError,
    NpaModel,
    SignalCovariance,
    amplify,
    bussgang_gain,
    distortion_autocorr,
    dbm_to_watt,
    instantaneous_gain,
    pa_power,
    radiated_power,
    scale_to_pa_power,
)

NPA = NpaModel()
LINEAR = NPA.linearized()


def test_default_parameters():
    assert NPA.beta1 == 2.96
    assert NPA.p_max == pytest.approx(3.981071705534972e-3, rel=1e-12)
    assert dbm_to_watt(30.0) == pytest.approx(1.0)


def test_instantaneous_gain_oracles():
    assert instantaneous_gain(NPA, 0.0) == 2.96
    rho = instantaneous_gain(NPA, 1.0)
    assert rho == pytest.approx(2.825649984752802 - 0.04535761681435205j, abs=1e-12)
    assert rho == pytest.approx(2.8256 - 0.0452j, abs=5e-4)
    assert instantaneous_gain(LINEAR, 3.0 + 4.0j) == 2.96
    assert amplify(NPA, 2.0) == pytest.approx(2.0 * instantaneous_gain(NPA, 2.0))


def test_from_polynomial_rejects_higher_orders():
    m = NpaModel.from_polynomial([2.0, 0.1, 0.0], 1e-3, 0.3)
    assert m.beta3 == 0.1
    with pytest.raises(ValueError, match="third-order"):
        NpaModel.from_polynomial([2.0, 0.1, 0.01], 1e-3, 0.3)


def test_model_validation():
    with pytest.raises(ValueError):
        NpaModel(p_max=0.0)
    with pytest.raises(ValueError):
        NpaModel(xi_max=1.5)


def test_bussgang_gain_oracles():
    U = np.eye(3, dtype=complex)
    G = bussgang_gain(NPA, SignalCovariance(U))
    assert np.count_nonzero(G - np.diag(np.diag(G))) == 0
    np.testing.assert_allclose(np.diag(G), 2.6912999695056032 - 0.0907152336287041j, atol=1e-12)
    np.testing.assert_allclose(np.diag(G), 2.6912 - 0.0905j, atol=5e-4)
    np.testing.assert_array_equal(bussgang_gain(LINEAR, SignalCovariance(U)), 2.96 * np.eye(3))


def test_distortion_scalar_oracle():
    D = distortion_autocorr(NPA, SignalCovariance(np.array([[1.0 + 0j]])))
    assert D[0, 0] == pytest.approx(0.04021448, abs=1e-12)
    assert np.all(distortion_autocorr(LINEAR, SignalCovariance(np.eye(2))) == 0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), nt=st.integers(1, 10), k=st.integers(1, 4))
def test_distortion_hermitian_psd(seed, nt, k):
    B = crandn(np.random.default_rng(seed), nt, k)
    D = distortion_autocorr(NPA, SignalCovariance.from_precoder(B))
    np.testing.assert_allclose(D, D.conj().T, atol=1e-14)
    eig = np.linalg.eigvalsh(D)
    assert eig[0] >= -1e-10 * max(eig[-1], 1e-300)


def test_radiated_power_oracles():
    assert np.all(radiated_power(NPA, np.zeros((3, 2))) == 0)
    prad = radiated_power(NPA, np.array([[1.0]]))
    assert prad[0] == pytest.approx(7.291539259473172, rel=1e-12)
    assert prad[0] == pytest.approx(7.2911, abs=1e-3)


def test_radiated_power_matches_bussgang_decomposition(rng):
    for _ in range(10):
        B = crandn(rng, 6, 3, scale=0.5)
        cov = SignalCovariance.from_precoder(B)
        G = bussgang_gain(NPA, cov)
        full = G @ cov.U @ G.conj().T + distortion_autocorr(NPA, cov)
        np.testing.assert_allclose(radiated_power(NPA, B), np.real(np.diag(full)),
                                   rtol=0, atol=1e-10)


def test_pa_power_oracles():
    assert pa_power(NPA, np.zeros((4, 2))) == 0.0
    # One antenna radiating exactly p_max draws p_max / xi_max.
    model = NpaModel(beta1=1.0, beta3=0.0)
    B = np.array([[np.sqrt(model.p_max)]])
    assert pa_power(model, B) == pytest.approx(model.p_max / model.xi_max, rel=1e-12)
    assert model.p_max / model.xi_max == pytest.approx(13.27e-3, rel=1e-3)


def test_pa_power_square_root_law(rng):
    B = crandn(rng, 5, 2)
    base = pa_power(LINEAR, B)
    for s in (0.25, 4.0, 9.0):
        assert pa_power(LINEAR, np.sqrt(s) * B) == pytest.approx(np.sqrt(s) * base, rel=1e-12)


class _BrokenCubic(NpaModel):
    @property
    def poly_coefficients(self):
        return 1.0, -5.0, 1.0


def test_radiated_power_never_negative_for_third_order(rng):
    # c2^2 <= 16 |beta1 beta3|^2 < 4 c1 c3, so the quadratic factor has no real root.
    for _ in range(20):
        model = NpaModel(crandn(rng), crandn(rng))
        assert np.all(radiated_power(model, crandn(rng, 5, 2, scale=10.0)) >= 0)


def test_pa_power_domain_error():
    model = _BrokenCubic()
    with pytest.raises(NpaDomainError, match="antenna 1"):
        pa_power(model, np.array([[0.1], [1.0]]))


def test_pa_power_monotone_in_entries(rng):
    B = crandn(rng, 4, 3, scale=0.3)
    base = pa_power(NPA, B)
    B2 = B.copy()
    B2[2, 1] *= 1.01
    assert pa_power(NPA, B2) > base


def test_scale_to_pa_power(rng):
    B = crandn(rng, 8, 3, scale=0.1)
    for target in (0.05, 1.0, 10.0):
        alpha = scale_to_pa_power(NPA, B, target, 1e-12 * target)
        assert pa_power(NPA, alpha * B) == pytest.approx(target, rel=1e-11)
    with pytest.raises(ValueError):
        scale_to_pa_power(NPA, np.zeros((2, 2)), 1.0, 1e-9)
