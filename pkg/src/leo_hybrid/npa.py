"""Third-order memoryless nonlinear power amplifier (NPA) model.

Every antenna has its own PA with the same polynomial response
``x = (beta1 + beta3 |u|^2) u``. For a Gaussian input ``u ~ CN(0, U)``
the output splits into a linear part ``G_bar u`` and a distortion ``d``
that is uncorrelated with ``u``; both statistics depend only on
``U = B B^H``.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_complex_matrix, check_positive

__all__ = [
    "NpaDomainError",
    "NpaModel",
    "SignalCovariance",
    "instantaneous_gain",
    "amplify",
    "bussgang_diagonal",
    "bussgang_gain",
    "distortion_autocorr",
    "antenna_input_power",
    "radiated_power",
    "pa_power",
    "dbm_to_watt",
    "scale_to_pa_power",
]


class NpaDomainError(ValueError):
    """The precoder drives a PA outside the region where the cubic model is physical."""


def dbm_to_watt(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0) * 1e-3


@dataclass(frozen=True)
class NpaModel:
    """Third-order PA polynomial plus its efficiency figures.

    Attributes
    ----------
    beta1, beta3 : complex
        Linear and third-order coefficients.
    p_max : float
        Maximum output power in watts.
    xi_max : float
        Peak drain efficiency, in (0, 1].
    """

    beta1: complex = 2.96
    beta3: complex = 0.1418 * np.exp(-2.816j)
    p_max: float = float(dbm_to_watt(6.0))
    xi_max: float = 0.3

    def __post_init__(self):
        object.__setattr__(self, "beta1", complex(self.beta1))
        object.__setattr__(self, "beta3", complex(self.beta3))
        check_positive(self.p_max, "p_max")
        check_positive(self.xi_max, "xi_max")
        if self.xi_max > 1:
            raise ValueError(f"xi_max must lie in (0, 1], got {self.xi_max}")

    @classmethod
    def from_polynomial(cls, coefficients, p_max, xi_max):
        """Build from odd-order coefficients ``[beta1, beta3, beta5, ...]``.

        Only the third-order truncation is modeled, so any nonzero
        coefficient beyond ``beta3`` is rejected rather than dropped.
        """
        coefficients = [complex(c) for c in coefficients]
        if not coefficients:
            raise ValueError("at least the linear coefficient beta1 is required")
        if any(c != 0 for c in coefficients[2:]):
            raise ValueError(
                "only third-order PA models are supported; got nonzero "
                f"coefficients up to order {2 * len(coefficients) - 1}"
            )
        beta3 = coefficients[1] if len(coefficients) > 1 else 0.0
        return cls(coefficients[0], beta3, p_max, xi_max)

    @classmethod
    def from_polar(cls, beta1_mag, beta1_phase, beta3_mag, beta3_phase, p_max_dbm, xi_max):
        return cls(
            beta1_mag * np.exp(1j * beta1_phase),
            beta3_mag * np.exp(1j * beta3_phase),
            float(dbm_to_watt(p_max_dbm)),
            xi_max,
        )

    def linearized(self):
        """Same PA with the third-order term removed."""
        return NpaModel(self.beta1, 0.0, self.p_max, self.xi_max)

    @property
    def power_scale(self) -> float:
        """``sqrt(p_max) / xi_max``, the factor mapping ``sqrt(P_rad)`` to consumed power."""
        return np.sqrt(self.p_max) / self.xi_max

    @property
    def poly_coefficients(self):
        """Coefficients ``(c1, c2, c3)`` of ``P_rad(p) = c1 p + c2 p^2 + c3 p^3``."""
        b1, b3 = self.beta1, self.beta3
        c1 = abs(b1) ** 2
        c2 = 4.0 * (b1 * np.conj(b3)).real
        c3 = 6.0 * abs(b3) ** 2
        return c1, c2, c3


@dataclass(frozen=True)
class SignalCovariance:
    """Covariance ``U = B B^H`` of the PA input vector."""

    U: np.ndarray

    @classmethod
    def from_precoder(cls, B):
        B = check_complex_matrix(B, "B")
        return cls(B @ B.conj().T)

    @property
    def epsilon(self) -> np.ndarray:
        """Per-antenna input power, the real diagonal of ``U``."""
        return np.real(np.diag(self.U)).copy()


def instantaneous_gain(model: NpaModel, u):
    """Instantaneous PA gain ``beta1 + beta3 |u|^2``."""
    return model.beta1 + model.beta3 * np.abs(u) ** 2


def amplify(model: NpaModel, u):
    """PA output ``x = (beta1 + beta3 |u|^2) u``, elementwise."""
    return instantaneous_gain(model, u) * u


def bussgang_diagonal(model: NpaModel, cov: SignalCovariance) -> np.ndarray:
    return model.beta1 + 2.0 * model.beta3 * cov.epsilon


def bussgang_gain(model: NpaModel, cov: SignalCovariance) -> np.ndarray:
    """Average linear gain matrix ``beta1 I + 2 beta3 diag(U)``."""
    return np.diag(bussgang_diagonal(model, cov))


def distortion_autocorr(model: NpaModel, cov: SignalCovariance) -> np.ndarray:
    """Distortion autocorrelation ``2 |beta3|^2 U o U o U^T``.

    ``U`` is Hermitian so ``U o U^T = |U|^2`` elementwise.
    """
    U = cov.U
    return 2.0 * abs(model.beta3) ** 2 * U * np.abs(U) ** 2


def antenna_input_power(B) -> np.ndarray:
    """Per-antenna input power ``p_n = sum_k |b_{n,k}|^2``."""
    return np.sum(np.abs(B) ** 2, axis=1)


def radiated_power(model: NpaModel, B) -> np.ndarray:
    """Expected output power ``E|x_n|^2`` of every PA.

    Equals the diagonal of ``G_bar U G_bar^H + D``, written as a cubic in
    the per-antenna input power.
    """
    B = check_complex_matrix(B, "B")
    p = antenna_input_power(B)
    c1, c2, c3 = model.poly_coefficients
    return c1 * p + c2 * p**2 + c3 * p**3


def pa_power(model: NpaModel, B) -> float:
    """Total power drawn by the PAs, ``sqrt(p_max)/xi_max * sum_n sqrt(P_rad,n)``.

    Raises
    ------
    NpaDomainError
        If some antenna has negative radiated power, which only happens
        when the cubic is driven far outside its validity range.
    """
    prad = radiated_power(model, B)
    bad = np.flatnonzero(prad < 0)
    if bad.size:
        n = int(bad[0])
        raise NpaDomainError(
            f"negative radiated power {prad[n]:.6g} W at antenna {n}; "
            "input power is outside the PA model's validity region"
        )
    return float(model.power_scale * np.sum(np.sqrt(prad)))


def _pa_power_from_input(model, p):
    c1, c2, c3 = model.poly_coefficients
    prad = c1 * p + c2 * p**2 + c3 * p**3
    return model.power_scale * np.sum(np.sqrt(np.maximum(prad, 0.0)))


def scale_to_pa_power(model: NpaModel, B, target, tol, max_iter=200):
    """Find ``alpha > 0`` with ``|P_PA(alpha B) - target| <= tol`` by bisection.

    The bracket grows geometrically when ``alpha > 1`` is required. When
    the tolerance cannot be met in ``max_iter`` halvings (floating point
    granularity), the lower end of the bracket is returned so the scaled
    precoder never exceeds ``target``.

    Raises
    ------
    ValueError
        If ``B`` is all zeros, or the target is unreachable by scaling.
    """
    check_positive(target, "target")
    p = antenna_input_power(np.asarray(B))
    if not np.any(p > 0):
        raise ValueError("cannot rescale an all-zero precoder to a positive PA power")

    def f(alpha):
        return _pa_power_from_input(model, alpha**2 * p)

    lo, hi = 0.0, 1.0
    f_hi = f(hi)
    while f_hi < target:
        lo, hi = hi, 2.0 * hi
        f_hi = f(hi)
        if hi > 1e150:
            raise ValueError("PA power target unreachable by scaling the precoder")
    if abs(f_hi - target) <= tol:
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if abs(f_mid - target) <= tol:
            return mid
        if f_mid < target:
            lo = mid
        else:
            hi = mid
    return lo
