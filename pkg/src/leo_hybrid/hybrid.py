"""Twin-resolution phase shifter (TRPS) hybrid precoder decomposition.

A fully digital precoder ``B`` is approximated by ``V W`` where the analog
part ``V`` only holds unit-modulus entries whose phases come from a
low-resolution set ``Q_L`` or a high-resolution set ``Q_H``. Starting from
an unquantized majorization-minimization (MM) fit, entries are quantized
one at a time (the one closest to its phase set goes first) and the
remaining free entries are refit after every step. The digital part is
finally rescaled so the PAs draw the same power as with ``B``.
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_complex_matrix, check_int
from .npa import NpaModel, pa_power, scale_to_pa_power
from .power import ArchitectureSpec

__all__ = [
    "PhaseSet",
    "TrpsNetwork",
    "HybridPrecoder",
    "angular_distance",
    "quantize_next",
    "least_squares_digital",
    "rotation_costs",
    "align_phases",
    "mm_update_fully",
    "decompose_fully",
    "block_phase_update",
    "decompose_partially",
    "normalize_digital",
    "decompose",
    "TrpsDecomposer",
]

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi

# Resolution codes stored per analog entry.
UNUSED, LOW, HIGH = 0, 1, 2


@dataclass(frozen=True)
class PhaseSet:
    """The ``2**bits`` phases ``2 pi m / 2**bits + pi / 2**bits`` of a uniform quantizer."""

    bits: int

    def __post_init__(self):
        check_int(self.bits, "bits", minimum=1)

    @property
    def size(self):
        return 2**self.bits

    @property
    def values(self) -> np.ndarray:
        n = self.size
        return TWO_PI * np.arange(n) / n + np.pi / n

    def nearest(self, angles):
        """Nearest phase (wrap-around metric) for each angle.

        Returns
        -------
        values : ndarray
            Members of :attr:`values`, bit-exact.
        distances : ndarray
        """
        angles = np.asarray(angles, dtype=float)
        vals = self.values
        d = angular_distance(angles[..., None], vals)
        idx = np.argmin(d, axis=-1)
        return vals[idx], np.take_along_axis(d, idx[..., None], axis=-1)[..., 0]


def angular_distance(a, b):
    """``min(|a - b|, 2 pi - |a - b|)`` after reducing the difference mod 2 pi."""
    delta = np.mod(np.asarray(a) - np.asarray(b), TWO_PI)
    return np.minimum(delta, TWO_PI - delta)


@dataclass(frozen=True)
class TrpsNetwork:
    """Structure of a TRPS analog network.

    Attributes
    ----------
    arch : {'fully', 'partially'}
    nt, mt : int
        Antennas and RF chains.
    q_high, q_low : PhaseSet
    n_low : int
        Number of low-resolution shifters (``N_L``); the rest are high.
    low_budgets : tuple of int, optional
        Fully connected only: low-resolution shifters per RF chain. Defaults
        to an even split with the remainder on the first chains.
    """

    arch: str
    nt: int
    mt: int
    q_high: PhaseSet = PhaseSet(4)
    q_low: PhaseSet = PhaseSet(2)
    n_low: int = 0
    low_budgets: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.arch not in ("fully", "partially"):
            raise ValueError(f"arch must be 'fully' or 'partially', got {self.arch!r}")
        check_int(self.nt, "nt", minimum=1)
        check_int(self.mt, "mt", minimum=1)
        if self.mt > self.nt:
            raise ValueError(f"mt={self.mt} exceeds nt={self.nt}")
        if self.arch == "partially" and self.nt % self.mt:
            raise ValueError(f"nt={self.nt} is not divisible by mt={self.mt}")
        check_int(self.n_low, "n_low", minimum=0)
        if self.n_low > self.n_shifters:
            raise ValueError(f"n_low={self.n_low} exceeds {self.n_shifters} phase shifters")
        if self.arch == "fully":
            budgets = self.low_budgets
            if budgets is None:
                base, extra = divmod(self.n_low, self.mt)
                budgets = tuple(base + (j < extra) for j in range(self.mt))
            budgets = tuple(int(b) for b in budgets)
            if len(budgets) != self.mt or sum(budgets) != self.n_low:
                raise ValueError("low_budgets must have mt entries summing to n_low")
            if any(b < 0 or b > self.nt for b in budgets):
                raise ValueError(f"each low budget must lie in [0, {self.nt}]")
            object.__setattr__(self, "low_budgets", budgets)
        elif self.low_budgets is not None:
            raise ValueError("low_budgets only apply to fully connected networks")

    @classmethod
    def from_spec(cls, spec: ArchitectureSpec, r_high=4, r_low=2, low_budgets=None):
        kind = spec.kind
        if kind.is_digital:
            raise ValueError("a fully digital transmitter has no analog network")
        arch = "fully" if kind.is_fully_connected else "partially"
        return cls(arch, spec.nt, spec.mt, PhaseSet(r_high), PhaseSet(r_low),
                   spec.n_low, low_budgets)

    @property
    def n_shifters(self):
        return self.nt * self.mt if self.arch == "fully" else self.nt

    @property
    def n_high(self):
        return self.n_shifters - self.n_low

    @property
    def ng(self):
        return self.nt // self.mt


@dataclass
class HybridPrecoder:
    """Result of a decomposition.

    Attributes
    ----------
    analog : ndarray, shape (nt, mt)
    digital : ndarray, shape (mt, K)
        The power-normalized digital precoder.
    phases : ndarray, shape (nt, mt)
        Angle of every nonzero analog entry (NaN elsewhere); each is a
        member of the phase set named by ``resolution``.
    resolution : ndarray of int8, shape (nt, mt)
        0 for structural zeros, 1 for low and 2 for high resolution.
    residual : float
        ``||B - analog @ digital||_F``.
    residual_trace : list of float
        ``||B - V W||_F`` (before power normalization) after the initial fit
        and after every quantization step.
    mm_histories : list of ndarray
        Objective history of every MM run (squared residual for the fully
        connected network, block correlation for the partially connected one).
    """

    analog: np.ndarray
    digital: np.ndarray
    phases: np.ndarray
    resolution: np.ndarray
    residual: float
    residual_trace: List[float] = field(default_factory=list)
    mm_histories: List[np.ndarray] = field(default_factory=list)

    @property
    def precoder(self):
        return self.analog @ self.digital

    @property
    def low_indices(self):
        return [tuple(map(int, ij)) for ij in np.argwhere(self.resolution == LOW)]

    @property
    def high_indices(self):
        return [tuple(map(int, ij)) for ij in np.argwhere(self.resolution == HIGH)]


def quantize_next(angles, phase_set: PhaseSet, candidates):
    """Pick the candidate whose angle is closest to ``phase_set``.

    Parameters
    ----------
    angles : ndarray
        Current angles, indexed by the entries of ``candidates``.
    phase_set : PhaseSet
    candidates : array_like of int
        Unquantized indices, ascending; ties go to the first one.

    Returns
    -------
    index : int
    value : float
        The nearest phase, bit-exact member of ``phase_set.values``.
    """
    candidates = np.asarray(candidates, dtype=int)
    if candidates.size == 0:
        raise ValueError("no candidates left to quantize")
    values, dist = phase_set.nearest(np.asarray(angles)[candidates])
    pos = int(np.argmin(dist))
    return int(candidates[pos]), float(values[pos])


def least_squares_digital(V, B):
    """``W = (V^H V)^{-1} V^H B``, regularized with ``1e-12 I`` if singular."""
    G = V.conj().T @ V
    rhs = V.conj().T @ B
    eig = np.linalg.eigvalsh(G)
    if eig[0] <= 1e-12 * max(eig[-1], 1e-300):
        warnings.warn("V^H V is singular; regularizing with 1e-12 I", RuntimeWarning,
                      stacklevel=2)
        G = G + 1e-12 * np.eye(G.shape[0])
    return np.linalg.solve(G, rhs)


def _analog_step(B, V, W, frozen):
    S = W @ W.conj().T
    lam = np.linalg.eigvalsh(S)[-1]
    C = W @ B.conj().T - (S - lam * np.eye(S.shape[0])) @ V.conj().T
    return np.where(frozen, V, np.exp(-1j * np.angle(C.T)))


def mm_update_fully(B, V, W, frozen):
    """One MM sweep for a fully connected analog precoder.

    ``W`` is refit by least squares for the current ``V``, then every entry
    of ``V`` outside ``frozen`` is set to ``exp(-j angle(C[k, n]))`` with
    ``C = W B^H - (S - lambda_max(S) I) V^H`` and ``S = W W^H``. The
    incoming ``W`` is only used for its shape.

    Returns
    -------
    V : ndarray, shape (nt, mt)
    W : ndarray, shape (mt, K)
        The least-squares digital precoder used to build the new ``V``.
    """
    W = least_squares_digital(V, B)
    return _analog_step(B, V, W, frozen), W


def _residual_sq(B, V, W):
    return float(np.linalg.norm(B - V @ W) ** 2)


def _run_mm_fully(B, V, frozen, tol, max_iter):
    """Iterate :func:`mm_update_fully` until the squared residual or its decrease drops below ``tol``."""
    W = least_squares_digital(V, B)
    history = [_residual_sq(B, V, W)]
    if frozen.all():
        return V, W, np.array(history)
    for _ in range(max_iter):
        # Same as mm_update_fully, reusing the W fitted to the current V.
        V = _analog_step(B, V, W, frozen)
        W = least_squares_digital(V, B)
        history.append(_residual_sq(B, V, W))
        if history[-1] < tol or history[-2] - history[-1] < tol:
            break
    return V, W, np.array(history)


def rotation_costs(angles, q_low: PhaseSet, q_high: PhaseSet):
    """Quantization cost of every candidate common rotation of ``angles``.

    Candidates put one angle exactly on a point of ``Q_L`` or ``Q_H``. For
    each candidate and each ``n`` the cost is the smallest summed angular
    distance when exactly ``n`` entries go to ``Q_L`` and the rest to ``Q_H``.

    Returns
    -------
    thetas : ndarray, shape (C,)
    costs : ndarray, shape (C, len(angles) + 1)
    """
    angles = np.asarray(angles, dtype=float).ravel()
    grid = np.unique(np.concatenate([q_low.values, q_high.values]))
    thetas = (grid[None, :] - angles[:, None]).ravel()
    shifted = angles[None, :] + thetas[:, None]
    d_low = angular_distance(shifted[:, :, None], q_low.values).min(axis=2)
    d_high = angular_distance(shifted[:, :, None], q_high.values).min(axis=2)
    extra = np.sort(d_low - d_high, axis=1)
    cum = np.concatenate([np.zeros((len(thetas), 1)), np.cumsum(extra, axis=1)], axis=1)
    return thetas, d_high.sum(axis=1)[:, None] + cum


def align_phases(angles, q_low: PhaseSet, q_high: PhaseSet, n_low: int) -> float:
    """Common rotation of ``angles`` that is cheapest to quantize with ``n_low`` low entries.

    ``V diag(e^{j theta}) diag(e^{-j theta}) W = V W``, so rotating a whole
    column (or block) is free once the digital part is refit. Ties go to
    the first candidate.
    """
    thetas, costs = rotation_costs(angles, q_low, q_high)
    return float(thetas[int(np.argmin(costs[:, n_low]))])


def _align_blocks(P, q_low, q_high, n_low):
    """Per-block rotations sharing a global low-resolution budget.

    A knapsack over blocks picks how many low entries each block takes so
    the summed quantization cost is minimal.
    """
    mt, ng = P.shape
    tables = [rotation_costs(np.angle(P[j]), q_low, q_high) for j in range(mt)]
    best = np.full(n_low + 1, np.inf)
    best[0] = 0.0
    choice = []
    for thetas, costs in tables:
        per_n = costs.min(axis=0)
        nxt = np.full(n_low + 1, np.inf)
        arg = np.zeros(n_low + 1, dtype=int)
        for t in range(n_low + 1):
            for n in range(min(ng, t) + 1):
                c = best[t - n] + per_n[n]
                if c < nxt[t]:
                    nxt[t], arg[t] = c, n
        best = nxt
        choice.append(arg)
    rot = np.zeros(mt)
    t = n_low
    for j in range(mt - 1, -1, -1):
        n = choice[j][t]
        thetas, costs = tables[j]
        rot[j] = thetas[int(np.argmin(costs[:, n]))]
        t -= n
    return rot


def _initial_analog(B, mt):
    """Phases of the leading ``mt`` left singular vectors of ``B``."""
    U, _, _ = np.linalg.svd(B, full_matrices=True)
    return np.exp(1j * np.angle(U[:, :mt]))


def _subspace_analog(B, mt, n_starts=None, n_iter=500, seed=0):
    """Unit-modulus columns found by alternating projection onto ``range(B)``.

    Each start iterates ``v <- exp(j angle(P v))`` with ``P`` the projector
    onto the column space of ``B``. Converged vectors are ranked by their
    distance to the subspace and kept greedily unless nearly collinear with
    one already kept; missing columns come from :func:`_initial_analog`.
    """
    nt = B.shape[0]
    U, _, _ = np.linalg.svd(B, full_matrices=False)
    rng = np.random.default_rng(seed)
    n_starts = 4 * mt if n_starts is None else n_starts
    starts = np.concatenate(
        [np.exp(1j * np.angle(U)), np.exp(TWO_PI * 1j * rng.random((nt, n_starts)))], axis=1
    )
    v = starts
    for _ in range(n_iter):
        v = np.exp(1j * np.angle(U @ (U.conj().T @ v)))
    err = np.linalg.norm(v - U @ (U.conj().T @ v), axis=0)
    kept = []
    for i in np.argsort(err, kind="stable"):
        if all(abs(np.vdot(v[:, j], v[:, i])) < 0.99 * nt for j in kept):
            kept.append(i)
        if len(kept) == mt:
            break
    V = _initial_analog(B, mt)
    V[:, : len(kept)] = v[:, kept]
    return V


def normalize_digital(V, W, npa: NpaModel, target_pa_power, tol=None):
    """Rescale ``W`` so that ``P_PA(V W) = target_pa_power``.

    Raises
    ------
    ValueError
        If ``V W`` is zero.
    """
    if tol is None:
        tol = 1e-10 * target_pa_power
    mu = scale_to_pa_power(npa, V @ W, target_pa_power, tol)
    return mu * W


def _default_tol(B):
    return 1e-6 * float(np.linalg.norm(B) ** 2)


def decompose_fully(B, network: TrpsNetwork, npa: NpaModel = None, tol=None, max_iter=200,
                    target_pa_power=None):
    """Fully connected TRPS decomposition.

    RF chains are processed in order. For chain ``k`` the ``low_budgets[k]``
    entries closest to ``Q_L`` are quantized one by one, each followed by an
    MM refit of the still-free entries; the remaining entries are then
    quantized to ``Q_H`` the same way, chain by chain.

    Parameters
    ----------
    B : ndarray, shape (nt, K)
    network : TrpsNetwork
        Must be fully connected.
    npa : NpaModel, optional
        PA model used for the final power normalization.
    tol : float, optional
        MM stopping threshold on the squared residual and on its decrease;
        defaults to ``1e-6 ||B||_F^2``.
    max_iter : int
        Maximum MM sweeps per refit.
    target_pa_power : float, optional
        Defaults to ``P_PA(B)``.
    """
    if network.arch != "fully":
        raise ValueError("decompose_fully needs a fully connected network")
    B = check_complex_matrix(B, "B", shape=(network.nt, None))
    if B.shape[1] > network.mt:
        raise ValueError(f"{B.shape[1]} users exceed mt={network.mt} RF chains")
    npa = npa if npa is not None else NpaModel()
    tol = _default_tol(B) if tol is None else tol
    nt, mt = network.nt, network.mt

    frozen = np.zeros((nt, mt), dtype=bool)
    phases = np.full((nt, mt), np.nan)
    resolution = np.zeros((nt, mt), dtype=np.int8)
    # Two starts; keep whichever MM fit ends lower.
    fits = [_run_mm_fully(B, V0, frozen, tol, max_iter)
            for V0 in (_initial_analog(B, mt), _subspace_analog(B, mt))]
    V, W, hist = min(fits, key=lambda f: f[2][-1])
    for k in range(mt):
        theta = align_phases(np.angle(V[:, k]), network.q_low, network.q_high,
                             network.low_budgets[k])
        V[:, k] *= np.exp(1j * theta)
    W = least_squares_digital(V, B)
    histories = [hist]
    trace = [float(np.sqrt(hist[-1]))]

    def quantize(k, phase_set, code):
        nonlocal V, W
        rows = np.flatnonzero(~frozen[:, k])
        i, psi = quantize_next(np.angle(V[:, k]), phase_set, rows)
        V[i, k] = np.exp(1j * psi)
        phases[i, k] = psi
        resolution[i, k] = code
        frozen[i, k] = True
        V, W, h = _run_mm_fully(B, V, frozen, tol, max_iter)
        histories.append(h)
        trace.append(float(np.sqrt(h[-1])))

    for k in range(mt):
        for _ in range(network.low_budgets[k]):
            quantize(k, network.q_low, LOW)
    for k in range(mt):
        for _ in range(nt - network.low_budgets[k]):
            quantize(k, network.q_high, HIGH)

    W = least_squares_digital(V, B)
    target = pa_power(npa, B) if target_pa_power is None else target_pa_power
    W_bar = normalize_digital(V, W, npa, target)
    return HybridPrecoder(V, W_bar, phases, resolution,
                          float(np.linalg.norm(B - V @ W_bar)), trace, histories)


def _blocks(C, mt, ng):
    idx = np.arange(mt)[:, None] * ng + np.arange(ng)
    return C[idx[:, :, None], idx[:, None, :]]


def block_phase_update(r, D_blocks, frozen):
    """One round of ``[p_j]_k <- exp(j angle([D_j p_j]_k))`` on the free entries of ``r``."""
    mt, ng, _ = D_blocks.shape
    P = r.reshape(mt, ng)
    Dp = np.einsum("jab,jb->ja", D_blocks, P).reshape(-1)
    return np.where(frozen, r, np.exp(1j * np.angle(Dp)))


def _block_objective(r, D_blocks):
    mt, ng, _ = D_blocks.shape
    P = r.reshape(mt, ng)
    return float(np.real(np.einsum("ja,jab,jb->", P.conj(), D_blocks, P)))


def _run_block_updates(r, D_blocks, frozen, rounds, tol):
    history = [_block_objective(r, D_blocks)]
    if frozen.all():
        return r, np.array(history)
    for _ in range(rounds):
        r = block_phase_update(r, D_blocks, frozen)
        history.append(_block_objective(r, D_blocks))
        if history[-1] - history[-2] < tol:
            break
    return r, np.array(history)


def _block_analog(r, mt, ng):
    V = np.zeros((mt * ng, mt), dtype=complex)
    V[np.arange(mt * ng), np.arange(mt * ng) // ng] = r
    return V


def decompose_partially(B, network: TrpsNetwork, npa: NpaModel = None, mm_rounds=50,
                        tol=None, target_pa_power=None):
    """Partially connected TRPS decomposition.

    With a block-diagonal ``V`` and the optimal ``W``, minimizing the
    residual is equivalent to maximizing ``sum_j p_j^H D_j p_j`` where
    ``D_j`` is the ``j``-th diagonal block of ``B B^H``. The flattened
    phase vector ``r = [p_1; ...; p_mt]`` is quantized one entry at a time
    (``n_low`` entries to ``Q_L``, then the rest to ``Q_H``), each step
    followed by up to ``mm_rounds`` block updates of the free entries.

    Parameters
    ----------
    tol : float, optional
        Stop the block updates once the objective gains less than this;
        defaults to ``1e-12 ||B||_F^4``.
    """
    if network.arch != "partially":
        raise ValueError("decompose_partially needs a partially connected network")
    B = check_complex_matrix(B, "B", shape=(network.nt, None))
    if B.shape[1] > network.mt:
        raise ValueError(f"{B.shape[1]} users exceed mt={network.mt} RF chains")
    check_int(mm_rounds, "mm_rounds", minimum=1)
    npa = npa if npa is not None else NpaModel()
    nt, mt, ng = network.nt, network.mt, network.ng
    if tol is None:
        tol = 1e-12 * float(np.linalg.norm(B)) ** 4

    D_blocks = _blocks(B @ B.conj().T, mt, ng)
    # Start from the dominant eigenvector phases of each block.
    _, vecs = np.linalg.eigh(D_blocks)
    r = np.exp(1j * np.angle(vecs[:, :, -1])).reshape(-1)
    frozen = np.zeros(nt, dtype=bool)
    phases = np.full(nt, np.nan)
    resolution = np.zeros(nt, dtype=np.int8)
    r, hist = _run_block_updates(r, D_blocks, frozen, max(mm_rounds, 200), tol)
    P = r.reshape(mt, ng)
    P *= np.exp(1j * _align_blocks(P, network.q_low, network.q_high, network.n_low))[:, None]
    histories = [hist]

    def residual(r):
        V = _block_analog(r, mt, ng)
        return float(np.linalg.norm(B - V @ least_squares_digital(V, B)))

    trace = [residual(r)]

    def quantize(phase_set, code):
        nonlocal r
        i, psi = quantize_next(np.angle(r), phase_set, np.flatnonzero(~frozen))
        r = r.copy()
        r[i] = np.exp(1j * psi)
        phases[i] = psi
        resolution[i] = code
        frozen[i] = True
        r, h = _run_block_updates(r, D_blocks, frozen, mm_rounds, tol)
        histories.append(h)
        trace.append(residual(r))

    for _ in range(network.n_low):
        quantize(network.q_low, LOW)
    for _ in range(network.n_high):
        quantize(network.q_high, HIGH)

    V = _block_analog(r, mt, ng)
    W = least_squares_digital(V, B)
    target = pa_power(npa, B) if target_pa_power is None else target_pa_power
    W_bar = normalize_digital(V, W, npa, target)
    cols = np.arange(nt) // ng
    phase_mat = np.full((nt, mt), np.nan)
    phase_mat[np.arange(nt), cols] = phases
    res_mat = np.zeros((nt, mt), dtype=np.int8)
    res_mat[np.arange(nt), cols] = resolution
    return HybridPrecoder(V, W_bar, phase_mat, res_mat,
                          float(np.linalg.norm(B - V @ W_bar)), trace, histories)


def decompose(B, network: TrpsNetwork, npa: NpaModel = None, **kwargs):
    """Dispatch to :func:`decompose_fully` or :func:`decompose_partially`."""
    if network.arch == "fully":
        return decompose_fully(B, network, npa, **kwargs)
    return decompose_partially(B, network, npa, **kwargs)


class TrpsDecomposer(TransformerMixin, BaseEstimator):
    """Factor a fully digital precoder into TRPS analog and digital parts.

    ``fit`` takes the ``(nt, K)`` precoder ``B`` itself and learns the
    quantized analog network; ``transform`` maps any precoder onto that
    fixed network (least-squares digital part, PA-power matched) and
    returns the resulting hybrid precoder ``V W``.

    Parameters
    ----------
    n_rf_chains : int
    architecture : {'fully', 'partially'}
    r_high, r_low : int
        Phase shifter resolutions in bits.
    hi_res_ratio : float
        Fraction of high-resolution shifters, ignored when ``n_low`` is set.
    n_low : int, optional
    low_budgets : tuple of int, optional
    npa : NpaModel, optional
    tol : float, optional
    max_iter : int
        MM sweeps per refit (fully connected).
    mm_rounds : int
        Block updates per quantization step (partially connected).

    Attributes
    ----------
    network_ : TrpsNetwork
    result_ : HybridPrecoder
    analog_ : ndarray, shape (nt, n_rf_chains)
    digital_ : ndarray, shape (n_rf_chains, K)
    residual_ : float
    """

    def __init__(self, n_rf_chains=4, architecture="fully", r_high=4, r_low=2,
                 hi_res_ratio=0.5, n_low=None, low_budgets=None, npa=None, tol=None,
                 max_iter=200, mm_rounds=50):
        self.n_rf_chains = n_rf_chains
        self.architecture = architecture
        self.r_high = r_high
        self.r_low = r_low
        self.hi_res_ratio = hi_res_ratio
        self.n_low = n_low
        self.low_budgets = low_budgets
        self.npa = npa
        self.tol = tol
        self.max_iter = max_iter
        self.mm_rounds = mm_rounds

    def _network(self, nt):
        mt = self.n_rf_chains
        total = nt * mt if self.architecture == "fully" else nt
        n_low = self.n_low
        if n_low is None:
            if not 0.0 <= self.hi_res_ratio <= 1.0:
                raise ValueError(f"hi_res_ratio must lie in [0, 1], got {self.hi_res_ratio}")
            n_low = total - int(round(self.hi_res_ratio * total))
        budgets = None if self.low_budgets is None else tuple(self.low_budgets)
        return TrpsNetwork(self.architecture, nt, mt, PhaseSet(self.r_high),
                           PhaseSet(self.r_low), n_low, budgets)

    def fit(self, B, y=None):
        B = check_complex_matrix(B, "B")
        network = self._network(B.shape[0])
        npa = self.npa if self.npa is not None else NpaModel()
        if network.arch == "fully":
            result = decompose_fully(B, network, npa, tol=self.tol, max_iter=self.max_iter)
        else:
            result = decompose_partially(B, network, npa, mm_rounds=self.mm_rounds,
                                         tol=self.tol)
        self.network_ = network
        self.result_ = result
        self.analog_ = result.analog
        self.digital_ = result.digital
        self.residual_ = result.residual
        return self

    def transform(self, B):
        check_is_fitted(self, "analog_")
        B = check_complex_matrix(B, "B", shape=(self.analog_.shape[0], None))
        npa = self.npa if self.npa is not None else NpaModel()
        W = least_squares_digital(self.analog_, B)
        return self.analog_ @ normalize_digital(self.analog_, W, npa, pa_power(npa, B))
