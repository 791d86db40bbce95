"""Energy-efficiency maximization of a fully digital precoder.

The ratio ``EE(B) = Bw * sum_k R_bar_k(B) / P_total(B)`` is maximized by
Dinkelbach's method: for a fixed price ``eta`` the difference
``F(B, eta) = Bw * sum_k R_bar_k(B) - eta * P_total(B)`` is increased by a
few projected steepest-ascent steps, then ``eta`` is reset to the current
EE. The only constraint is the PA power budget ``P_PA(B) <= P``, and
projecting onto it is a scalar rescaling found by bisection.

Gradients are Wirtinger derivatives with respect to ``conj(B)``. With
this convention ``F(B + dB) ~ F(B) + 2 Re <grad, dB>``.
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_complex_matrix, check_int, check_positive, check_real_vector
from .channel import noise_power as thermal_noise_power
from .npa import (
    NpaModel,
    antenna_input_power,
    bussgang_diagonal,
    pa_power,
    scale_to_pa_power,
    SignalCovariance,
)
from .power import Architecture, ArchitectureSpec, ComponentPowers, transmitter_power
from .rate import sum_rate_bound

__all__ = [
    "EEProblem",
    "SolverConfig",
    "InnerRecord",
    "OuterRecord",
    "DinkelbachTrace",
    "objective_f",
    "grad_rate",
    "grad_power",
    "grad_objective",
    "project_power",
    "initial_precoder",
    "inner_ascent",
    "dinkelbach_solve",
    "DinkelbachPrecoder",
]

logger = logging.getLogger(__name__)

LOG2E = 1.0 / np.log(2.0)


@dataclass(frozen=True)
class EEProblem:
    """Everything the EE objective depends on besides the precoder.

    Attributes
    ----------
    steering : ndarray, shape (nt, K)
        Array responses of the users as columns.
    gains : ndarray, shape (K,)
        Average channel powers.
    npa : NpaModel
    n0 : float
        Noise power in watts.
    bandwidth : float
        System bandwidth in Hz.
    spec : ArchitectureSpec
    comps : ComponentPowers
    """

    steering: np.ndarray
    gains: np.ndarray
    npa: NpaModel
    n0: float
    bandwidth: float
    spec: ArchitectureSpec
    comps: ComponentPowers

    def __post_init__(self):
        steering = check_complex_matrix(self.steering, "steering")
        nt, k = steering.shape
        gains = check_real_vector(self.gains, "gains", size=k, nonnegative=True)
        object.__setattr__(self, "steering", steering)
        object.__setattr__(self, "gains", gains)
        check_positive(self.n0, "n0")
        check_positive(self.bandwidth, "bandwidth")
        if self.spec.nt != nt:
            raise ValueError(f"architecture has nt={self.spec.nt}, steering has {nt} rows")
        if not self.spec.kind.is_digital and k > self.spec.mt:
            raise ValueError(f"{k} users exceed mt={self.spec.mt} RF chains")

    @property
    def nt(self):
        return self.steering.shape[0]

    @property
    def n_users(self):
        return self.steering.shape[1]

    @property
    def static_power(self) -> float:
        return transmitter_power(self.spec, self.comps)

    def sum_rate(self, B) -> float:
        return sum_rate_bound(B, self.steering, self.gains, self.npa, self.n0)

    def total_power(self, B) -> float:
        return pa_power(self.npa, B) + self.static_power

    def energy_efficiency(self, B) -> float:
        return self.bandwidth * self.sum_rate(B) / self.total_power(B)

    def with_npa(self, npa):
        return EEProblem(self.steering, self.gains, npa, self.n0, self.bandwidth,
                         self.spec, self.comps)


@dataclass
class SolverConfig:
    """Knobs of the Dinkelbach / projected gradient solver.

    ``epsilon=None`` means ``1e-3 * bandwidth * K``; ``bisection_tol=None``
    means ``1e-9 * power_budget``; ``initial_step=None`` starts every outer
    iteration with the step that moves ``B`` by its own Frobenius norm.
    """

    power_budget: float
    epsilon: Optional[float] = None
    inner_iters: int = 20
    max_outer_iters: int = 10
    initial_step: Optional[float] = None
    rss_rsc_ratio_floor: float = 2.5
    bisection_tol: Optional[float] = None
    max_backtracks: int = 50

    def __post_init__(self):
        check_positive(self.power_budget, "power_budget")
        if self.epsilon is not None:
            check_positive(self.epsilon, "epsilon")
        check_int(self.inner_iters, "inner_iters", minimum=1)
        check_int(self.max_outer_iters, "max_outer_iters", minimum=1)
        if self.initial_step is not None:
            check_positive(self.initial_step, "initial_step")
        if not self.rss_rsc_ratio_floor > 2:
            raise ValueError("rss_rsc_ratio_floor must exceed 2")
        if self.bisection_tol is not None:
            check_positive(self.bisection_tol, "bisection_tol")
        check_int(self.max_backtracks, "max_backtracks", minimum=1)

    def resolved_epsilon(self, problem):
        if self.epsilon is not None:
            return self.epsilon
        return 1e-3 * problem.bandwidth * problem.n_users

    def resolved_bisection_tol(self):
        if self.bisection_tol is not None:
            return self.bisection_tol
        return 1e-9 * self.power_budget


@dataclass(frozen=True)
class InnerRecord:
    outer: int
    inner: int
    objective: float
    energy_efficiency: float
    eta: float
    pa_power: float
    step: float


@dataclass(frozen=True)
class OuterRecord:
    eta: float
    objective: float
    energy_efficiency: float
    pa_power: float


@dataclass
class DinkelbachTrace:
    outer: List[OuterRecord] = field(default_factory=list)
    inner: List[InnerRecord] = field(default_factory=list)
    converged: bool = False
    warnings: List[str] = field(default_factory=list)

    @property
    def n_iter(self):
        return len(self.outer)

    @property
    def energy_efficiency(self):
        return np.array([r.energy_efficiency for r in self.outer])


def objective_f(B, eta, problem: EEProblem) -> float:
    """Dinkelbach objective ``Bw * sum_k R_bar_k(B) - eta * P_total(B)``."""
    return problem.bandwidth * problem.sum_rate(B) - eta * problem.total_power(B)


def grad_rate(B, problem: EEProblem) -> np.ndarray:
    """Wirtinger gradient ``sum_k dR_bar_k / d conj(B)``.

    Each rate is ``log2(1 + f_k / g_k)`` with signal ``f_k`` and effective
    noise ``g_k = interference + distortion + N0``. The quotient rule gives
    ``log2(e) (g_k df_k - f_k dg_k) / (g_k (g_k + f_k))``.

    The pieces use ``s[k, l] = v_k^H G_bar b_l``:

    * the gain matrix ``T_k = G_bar^H v_k v_k^H G_bar`` enters only through
      ``T_k b_l = conj(G_bar) v_k s[k, l]`` and hits column ``l``;
    * because ``G_bar`` depends on the per-antenna input powers, every
      ``|s[k, l]|^2`` also contributes the diagonal term ``Q_{k,l} b_i`` to
      every column ``i``, with ``Q_{k,l} = 4 diag(Re(conj(s[k, l]) beta3
      conj(v_k) o b_l))``;
    * the distortion ``gamma_k v_k^H D v_k`` differentiates to
      ``2 gamma_k |beta3|^2 (2 v_k o (|U|^2 (conj(v_k) o b_j)) +
      conj(v_k) o ((U o U) (v_k o b_j)))`` for column ``j``.
    """
    B = np.asarray(B, dtype=complex)
    V, gamma, npa = problem.steering, problem.gains, problem.npa
    nt, K = B.shape
    beta3 = npa.beta3

    U = B @ B.conj().T
    gbar = bussgang_diagonal(npa, SignalCovariance(U))
    S = V.conj().T @ (gbar[:, None] * B)
    absU2 = np.abs(U) ** 2
    UU = U * U
    dist = np.real(np.einsum("nk,nm,mk->k", V.conj(), 2 * abs(beta3) ** 2 * U * absU2, V))

    power = np.abs(S) ** 2
    f = gamma * np.diag(power)
    g = gamma * (power.sum(axis=1) - np.diag(power) + np.maximum(dist, 0.0)) + problem.n0

    # Q_{k,l} diagonals as a (K, K, nt) real array.
    Q = 4.0 * np.real(np.conj(S)[:, :, None] * beta3 * V.conj().T[:, None, :] * B.T[None, :, :])

    grad = np.zeros_like(B)
    for k in range(K):
        vk = V[:, k]
        tk = np.conj(gbar) * vk
        df = np.zeros_like(B)
        df[:, k] = tk * S[k, k]
        df += B * Q[k, k][:, None]
        df *= gamma[k]

        dgi = np.outer(tk, S[k]) + B * (Q[k].sum(axis=0) - Q[k, k])[:, None]
        dgi[:, k] -= tk * S[k, k]
        dgd = (
            2.0 * vk[:, None] * (absU2 @ (vk.conj()[:, None] * B))
            + vk.conj()[:, None] * (UU @ (vk[:, None] * B))
        ) * (2.0 * abs(beta3) ** 2)
        dg = gamma[k] * (dgi + dgd)

        grad += LOG2E * (g[k] * df - f[k] * dg) / (g[k] * (g[k] + f[k]))
    return grad


def grad_power(B, npa: NpaModel) -> np.ndarray:
    """Wirtinger gradient of ``P_total`` (equivalently ``P_PA``) w.r.t. ``conj(B)``.

    Rows with zero input power have no defined derivative (``sqrt`` at the
    origin); their gradient is set to zero.
    """
    B = np.asarray(B, dtype=complex)
    p = antenna_input_power(B)
    c1, c2, c3 = npa.poly_coefficients
    prad = c1 * p + c2 * p**2 + c3 * p**3
    slope = c1 + 2 * c2 * p + 3 * c3 * p**2
    coef = np.zeros_like(p)
    active = prad > 0
    coef[active] = npa.power_scale * slope[active] / (2.0 * np.sqrt(prad[active]))
    return coef[:, None] * B


def grad_objective(B, eta, problem: EEProblem) -> np.ndarray:
    return problem.bandwidth * grad_rate(B, problem) - eta * grad_power(B, problem.npa)


def project_power(B_hat, npa: NpaModel, power_budget: float, bisection_tol: float):
    """Project onto ``{B : P_PA(B) <= power_budget}`` by scaling.

    Returns ``B_hat`` itself when it is feasible, otherwise ``alpha * B_hat``
    with ``alpha`` in (0, 1) such that ``P_PA`` hits the budget within
    ``bisection_tol``.
    """
    if pa_power(npa, B_hat) <= power_budget:
        return B_hat
    alpha = scale_to_pa_power(npa, B_hat, power_budget, bisection_tol)
    return alpha * B_hat


def initial_precoder(problem: EEProblem, power_budget: float, bisection_tol: float):
    """Matched filter ``B = c [v_1, ..., v_K]`` scaled so that ``P_PA(B) = P``."""
    B0 = problem.steering.copy()
    alpha = scale_to_pa_power(problem.npa, B0, power_budget, bisection_tol)
    return alpha * B0


def inner_ascent(B0, eta, problem: EEProblem, config: SolverConfig,
                 trace: Optional[DinkelbachTrace] = None, outer_index=0):
    """Run ``config.inner_iters`` projected steepest-ascent steps on ``F(., eta)``.

    The step ``mu = 1 / zeta`` is found by backtracking (halving) until the
    restricted smoothness bound, oriented for maximization,

        F(B+) - F(B) >= Re<grad, B+ - B> - zeta / 2 ||B+ - B||_F^2,

    holds and ``F`` does not decrease. Each backtracking search starts from
    twice the last accepted step, capped at the outer iteration's initial
    step. If it fails ``max_backtracks`` times, the iteration takes a zero
    step, the inner loop stops and a warning is recorded in the trace.
    """
    tol = config.resolved_bisection_tol()
    B = np.asarray(B0, dtype=complex)
    F = objective_f(B, eta, problem)
    mu0 = config.initial_step
    step = None
    for j in range(config.inner_iters):
        G = grad_objective(B, eta, problem)
        gnorm = np.linalg.norm(G)
        if gnorm == 0.0:
            break
        if mu0 is None:
            mu0 = max(np.linalg.norm(B), 1e-300) / gnorm
        step = mu0 if step is None else min(2.0 * step, mu0)
        accepted = False
        for _ in range(config.max_backtracks):
            zeta = 1.0 / step
            B_new = project_power(B + step * G, problem.npa, config.power_budget, tol)
            delta = B_new - B
            F_new = objective_f(B_new, eta, problem)
            lower = np.real(np.vdot(G, delta)) - 0.5 * zeta * np.linalg.norm(delta) ** 2
            if F_new >= F and F_new - F >= lower:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            # The search restarts from the same point with the same step, so
            # it would fail again; B is numerically stationary.
            msg = (f"outer {outer_index}, inner {j}: backtracking exhausted "
                   f"after {config.max_backtracks} halvings; inner loop stopped")
            logger.info(msg)
            if trace is not None:
                trace.warnings.append(msg)
                trace.inner.append(InnerRecord(outer_index, j, F, problem.energy_efficiency(B),
                                               eta, pa_power(problem.npa, B), 0.0))
            break
        B, F = B_new, F_new
        if trace is not None:
            trace.inner.append(InnerRecord(outer_index, j, F, problem.energy_efficiency(B),
                                           eta, pa_power(problem.npa, B), step))
    return B


def dinkelbach_solve(problem: EEProblem, config: SolverConfig, B_init=None):
    """Maximize the EE of a fully digital precoder.

    Parameters
    ----------
    problem : EEProblem
    config : SolverConfig
    B_init : ndarray, optional
        Starting point. Defaults to the matched filter scaled to the full
        PA power budget.

    Returns
    -------
    B : ndarray, shape (nt, K)
        The iterate at termination, or the best one seen when the outer
        iteration limit is hit (``trace.converged`` is then false).
    trace : DinkelbachTrace
    """
    tol = config.resolved_bisection_tol()
    eps = config.resolved_epsilon(problem)
    if B_init is None:
        B = initial_precoder(problem, config.power_budget, tol)
    else:
        B = check_complex_matrix(B_init, "B_init", shape=(problem.nt, problem.n_users))
    trace = DinkelbachTrace()
    eta = 0.0
    best_B, best_ee = B, -np.inf
    for i in range(config.max_outer_iters):
        B = inner_ascent(B, eta, problem, config, trace=trace, outer_index=i)
        F = objective_f(B, eta, problem)
        ee = problem.energy_efficiency(B)
        trace.outer.append(OuterRecord(eta, F, ee, pa_power(problem.npa, B)))
        if ee > best_ee:
            best_B, best_ee = B, ee
        if F <= eps:
            trace.converged = True
            return B, trace
        eta = ee
    msg = f"Dinkelbach did not reach F <= {eps:.3g} in {config.max_outer_iters} iterations"
    logger.warning(msg)
    trace.warnings.append(msg)
    return best_B, trace


class DinkelbachPrecoder(BaseEstimator):
    """EE-maximizing fully digital precoder for an NPA-equipped transmitter.

    Users play the role of samples: ``X`` holds one array response per
    row, ``gains`` the matching average channel powers.

    Parameters
    ----------
    power_budget : float
        PA power budget ``P`` in watts.
    npa : NpaModel, optional
        Defaults to the third-order model with ``beta1 = 2.96``.
    architecture : ArchitectureSpec, optional
        Used for the static power term. Defaults to a fully digital
        transmitter with as many antennas as ``X`` has columns.
    components : ComponentPowers, optional
    bandwidth : float
        System bandwidth in Hz.
    noise_power : float, optional
        Defaults to thermal noise at 300 K over ``bandwidth``.
    epsilon, inner_iters, max_outer_iters, initial_step,
    rss_rsc_ratio_floor, bisection_tol
        See :class:`SolverConfig`.

    Attributes
    ----------
    precoder_ : ndarray, shape (n_features, n_samples)
        Optimized precoder ``B``, one column per user.
    problem_ : EEProblem
    trace_ : DinkelbachTrace
    energy_efficiency_ : float
    converged_ : bool
    n_iter_ : int
        Number of outer (Dinkelbach) iterations.
    """

    def __init__(self, power_budget=158.48931924611142, npa=None, architecture=None,
                 components=None, bandwidth=0.25e9, noise_power=None, epsilon=None,
                 inner_iters=20, max_outer_iters=10, initial_step=None,
                 rss_rsc_ratio_floor=2.5, bisection_tol=None):
        self.power_budget = power_budget
        self.npa = npa
        self.architecture = architecture
        self.components = components
        self.bandwidth = bandwidth
        self.noise_power = noise_power
        self.epsilon = epsilon
        self.inner_iters = inner_iters
        self.max_outer_iters = max_outer_iters
        self.initial_step = initial_step
        self.rss_rsc_ratio_floor = rss_rsc_ratio_floor
        self.bisection_tol = bisection_tol

    def _problem(self, X, gains):
        X = check_complex_matrix(X, "X")
        k, nt = X.shape
        if k > nt:
            raise ValueError(f"{k} users exceed {nt} antennas")
        gains = np.broadcast_to(np.asarray(gains, dtype=float), (k,))
        spec = self.architecture
        if spec is None:
            spec = ArchitectureSpec(Architecture.FULLY_DIGITAL, nt, nt)
        n0 = self.noise_power
        if n0 is None:
            n0 = thermal_noise_power(self.bandwidth, 300.0)
        return EEProblem(
            steering=X.T,
            gains=gains,
            npa=self.npa if self.npa is not None else NpaModel(),
            n0=n0,
            bandwidth=self.bandwidth,
            spec=spec,
            comps=self.components if self.components is not None else ComponentPowers(),
        )

    def _config(self):
        return SolverConfig(
            power_budget=self.power_budget,
            epsilon=self.epsilon,
            inner_iters=self.inner_iters,
            max_outer_iters=self.max_outer_iters,
            initial_step=self.initial_step,
            rss_rsc_ratio_floor=self.rss_rsc_ratio_floor,
            bisection_tol=self.bisection_tol,
        )

    def fit(self, X, gains, B_init=None):
        """Optimize the precoder for the users in ``X``.

        Parameters
        ----------
        X : array_like, shape (n_users, n_antennas)
            Array response of each user, one per row.
        gains : float or array_like, shape (n_users,)
            Average channel power of each user.
        B_init : array_like, shape (n_antennas, n_users), optional

        Returns
        -------
        self
        """
        problem = self._problem(X, gains)
        B, trace = dinkelbach_solve(problem, self._config(), B_init=B_init)
        if not trace.converged:
            warnings.warn(trace.warnings[-1], RuntimeWarning, stacklevel=2)
        self.problem_ = problem
        self.precoder_ = B
        self.trace_ = trace
        self.converged_ = trace.converged
        self.n_iter_ = trace.n_iter
        self.energy_efficiency_ = problem.energy_efficiency(B)
        return self

    def score(self, X, gains):
        """Energy efficiency (bit/J) of the fitted precoder for the users in ``X``."""
        check_is_fitted(self, "precoder_")
        problem = self._problem(X, gains)
        return problem.energy_efficiency(self.precoder_)
