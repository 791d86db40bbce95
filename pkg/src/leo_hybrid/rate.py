"""SINR, ergodic rate and energy efficiency of an NPA-distorted downlink."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_complex_matrix, check_positive, check_real_vector, check_int
from .channel import sample_gains
from .npa import NpaModel, SignalCovariance, bussgang_diagonal, distortion_autocorr
from .power import ArchitectureSpec, ComponentPowers, total_power

__all__ = [
    "RateBreakdown",
    "rate_terms",
    "rate_upper_bound",
    "sum_rate_bound",
    "ergodic_rate_mc",
    "energy_efficiency",
]


@dataclass(frozen=True)
class RateBreakdown:
    """Terms of one user's Jensen-bounded rate (powers in W, rate in bit/s/Hz)."""

    signal: float
    interference: float
    distortion: float
    noise: float
    rate_bound: float


def _check_link(B, steering, gains):
    B = check_complex_matrix(B, "B")
    nt, k = B.shape
    steering = check_complex_matrix(steering, "steering", shape=(nt, k))
    gains = check_real_vector(gains, "gains", size=k, nonnegative=True)
    return B, steering, gains


def _projections(B, steering, npa):
    """``M[k, l] = v_k^H G_bar b_l`` and the per-user distortion ``v_k^H D v_k``."""
    cov = SignalCovariance(B @ B.conj().T)
    gbar = bussgang_diagonal(npa, cov)
    M = steering.conj().T @ (gbar[:, None] * B)
    D = distortion_autocorr(npa, cov)
    dist = np.real(np.einsum("nk,nm,mk->k", steering.conj(), D, steering))
    return M, dist


def rate_terms(B, steering, gains, npa: NpaModel):
    """Vectorized signal, interference and distortion powers for every user.

    Parameters
    ----------
    B : ndarray, shape (nt, K)
        Fully digital precoder.
    steering : ndarray, shape (nt, K)
        Array responses ``v_k`` as columns.
    gains : ndarray, shape (K,)
        Average channel powers.

    Returns
    -------
    signal, interference, distortion : ndarray, shape (K,)
    """
    B, steering, gains = _check_link(B, steering, gains)
    M, dist = _projections(B, steering, npa)
    power = np.abs(M) ** 2
    own = np.diag(power)
    signal = gains * own
    interference = gains * (power.sum(axis=1) - own)
    distortion = gains * np.maximum(dist, 0.0)
    return signal, interference, distortion


def rate_upper_bound(B, steering, gains, npa: NpaModel, n0: float):
    """Jensen upper bound ``log2(1 + E{signal} / (E{interference + distortion} + N0))`` per user.

    Returns
    -------
    list of RateBreakdown
    """
    check_positive(n0, "n0")
    signal, interference, distortion = rate_terms(B, steering, gains, npa)
    rates = np.log2(1.0 + signal / (interference + distortion + n0))
    return [
        RateBreakdown(float(s), float(i), float(d), float(n0), float(r))
        for s, i, d, r in zip(signal, interference, distortion, rates)
    ]


def sum_rate_bound(B, steering, gains, npa: NpaModel, n0: float) -> float:
    signal, interference, distortion = rate_terms(B, steering, gains, npa)
    return float(np.sum(np.log2(1.0 + signal / (interference + distortion + n0))))


def ergodic_rate_mc(B, steering, gains, rician_factor, npa: NpaModel, n0: float,
                    n_samples: int, rng, return_stderr=False, chunk_size=65536):
    """Monte Carlo estimate of the ergodic rate ``E{log2(1 + SINR_k)}``.

    Each realization draws an independent Rician gain per user; ``G_bar``
    and ``D`` are ensemble statistics of the precoder and stay fixed.

    Parameters
    ----------
    rician_factor : float or array_like, shape (K,)
        Linear Rician K-factors.
    n_samples : int
        Number of channel realizations.
    rng : numpy.random.Generator
    return_stderr : bool
        Also return the standard error of every estimate.

    Returns
    -------
    rates : ndarray, shape (K,)
    stderr : ndarray, shape (K,)
        Only when ``return_stderr`` is true.
    """
    check_int(n_samples, "n_samples", minimum=1)
    check_positive(n0, "n0")
    B, steering, gains = _check_link(B, steering, gains)
    k = B.shape[1]
    kappa = np.broadcast_to(np.asarray(rician_factor, dtype=float), (k,))
    M, dist = _projections(B, steering, npa)
    power = np.abs(M) ** 2
    own = np.diag(power)
    other = power.sum(axis=1) - own + np.maximum(dist, 0.0)

    total = np.zeros(k)
    total_sq = np.zeros(k)
    done = 0
    while done < n_samples:
        n = min(chunk_size, n_samples - done)
        g2 = np.abs(sample_gains(gains, kappa, (n, k), rng)) ** 2
        r = np.log2(1.0 + g2 * own / (g2 * other + n0))
        total += r.sum(axis=0)
        total_sq += (r**2).sum(axis=0)
        done += n
    mean = total / n_samples
    if not return_stderr:
        return mean
    var = np.maximum(total_sq / n_samples - mean**2, 0.0)
    stderr = np.sqrt(var / max(n_samples - 1, 1))
    return mean, stderr


def energy_efficiency(B, steering, gains, npa: NpaModel, n0: float, bandwidth: float,
                      spec: ArchitectureSpec, comps: ComponentPowers) -> float:
    """``bandwidth * sum_k R_bar_k / P_total`` in bit/J, using the rate bound."""
    check_positive(bandwidth, "bandwidth")
    rate = sum_rate_bound(B, steering, gains, npa, n0)
    return bandwidth * rate / total_power(spec, comps, npa, np.asarray(B, dtype=complex))
