"""UPA array responses and Rician satellite-to-user channels.

The precoder design only ever sees statistical CSI (space angles and the
average channel power), so a user channel collapses to a single Rician
gain times the array response of its line of sight.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_int, check_positive, check_space_angle

__all__ = [
    "SPEED_OF_LIGHT",
    "BOLTZMANN",
    "ArrayGeometry",
    "UserChannelStats",
    "ChannelRealization",
    "upa_response",
    "steering_matrix",
    "channel_power",
    "noise_power",
    "sample_gain",
    "sample_gains",
    "sample_realization",
    "draw_user_stats",
]

SPEED_OF_LIGHT = 2.998e8
BOLTZMANN = 1.38e-23


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform planar array with ``nx`` by ``ny`` half-wavelength spaced elements."""

    nx: int
    ny: int

    def __post_init__(self):
        check_int(self.nx, "nx", minimum=1)
        check_int(self.ny, "ny", minimum=1)

    @property
    def nt(self) -> int:
        return self.nx * self.ny


@dataclass(frozen=True)
class UserChannelStats:
    """Statistical CSI of one user terminal.

    Attributes
    ----------
    space_angle_x, space_angle_y : float
        Space angles in [-1, 1) along the array axes.
    avg_power : float
        Average channel power ``E|g|^2`` (linear).
    rician_factor : float
        Rician K-factor (linear).
    """

    space_angle_x: float
    space_angle_y: float
    avg_power: float
    rician_factor: float

    def __post_init__(self):
        check_space_angle(self.space_angle_x, "space_angle_x")
        check_space_angle(self.space_angle_y, "space_angle_y")
        check_positive(self.avg_power, "avg_power", strict=False)
        check_positive(self.rician_factor, "rician_factor", strict=False)


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray
    gain: complex


def _axis_response(n, angle):
    return np.exp(-1j * np.pi * np.arange(n) * angle) / np.sqrt(n)


def upa_response(geometry: ArrayGeometry, space_angle_x: float, space_angle_y: float) -> np.ndarray:
    """Array response ``v_x(angle_x) kron v_y(angle_y)`` of a UPA.

    Each axis factor has entries ``exp(-j pi m angle) / sqrt(n)`` so the
    result has unit Euclidean norm.

    Raises
    ------
    ValueError
        If an angle is outside [-1, 1).
    """
    ax = check_space_angle(space_angle_x, "space_angle_x")
    ay = check_space_angle(space_angle_y, "space_angle_y")
    return np.kron(_axis_response(geometry.nx, ax), _axis_response(geometry.ny, ay))


def steering_matrix(geometry: ArrayGeometry, stats) -> np.ndarray:
    """Stack the array responses of ``stats`` as the columns of an ``(nt, K)`` matrix."""
    return np.column_stack(
        [upa_response(geometry, s.space_angle_x, s.space_angle_y) for s in stats]
    )


def channel_power(g_sat: float, g_ut: float, nt: int, fc: float, d0: float) -> float:
    """Average channel power ``g_sat g_ut nt (c / (4 pi fc d0))^2`` (linear gains, Hz, m)."""
    for value, name in ((g_sat, "g_sat"), (g_ut, "g_ut"), (fc, "fc"), (d0, "d0")):
        check_positive(value, name)
    check_int(nt, "nt", minimum=1)
    return g_sat * g_ut * nt * (SPEED_OF_LIGHT / (4 * np.pi * fc * d0)) ** 2


def noise_power(bandwidth: float, noise_temp_k: float) -> float:
    """Thermal noise power ``k_B * bandwidth * T`` in watts."""
    check_positive(bandwidth, "bandwidth")
    check_positive(noise_temp_k, "noise_temp_k", strict=False)
    return BOLTZMANN * bandwidth * noise_temp_k


def sample_gains(avg_power, rician_factor, size, rng) -> np.ndarray:
    """Draw Rician gains with ``E|g|^2 = avg_power``.

    ``avg_power`` and ``rician_factor`` broadcast against ``size``. The
    line-of-sight phase is uniform on [0, 2 pi) per draw.
    """
    gamma = np.asarray(avg_power, dtype=float)
    kappa = np.asarray(rician_factor, dtype=float)
    los_phase = rng.uniform(0.0, 2 * np.pi, size=size)
    diffuse = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)
    los_amp = np.sqrt(gamma * kappa / (1 + kappa))
    nlos_amp = np.sqrt(gamma / (1 + kappa))
    return los_amp * np.exp(1j * los_phase) + nlos_amp * diffuse


def sample_gain(stats: UserChannelStats, rng) -> complex:
    return complex(sample_gains(stats.avg_power, stats.rician_factor, (), rng))


def sample_realization(geometry: ArrayGeometry, stats: UserChannelStats, rng) -> ChannelRealization:
    g = sample_gain(stats, rng)
    v = upa_response(geometry, stats.space_angle_x, stats.space_angle_y)
    return ChannelRealization(h=g * v, gain=g)


def draw_user_stats(n_users, avg_power, rician_factor, rng):
    """Draw ``n_users`` users with i.i.d. uniform space angles in [-1, 1)."""
    check_int(n_users, "n_users", minimum=1)
    angles = rng.uniform(-1.0, 1.0, size=(n_users, 2))
    return [
        UserChannelStats(float(ax), float(ay), float(avg_power), float(rician_factor))
        for ax, ay in angles
    ]
