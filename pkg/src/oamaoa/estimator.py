"""Mode-frequency multi-time ESPRIT angle-of-arrival estimation.

Rows of the normalized grid are tones in wavenumber (phase step ``r`` mod
2*pi for unit spacing), columns are tones in mode number (phase step
``gamma``), and the reference vector is a tone with step ``xi`` mod 2*pi.
Only ``xi - r`` enters the final inversion, and ``|xi - r| <= R < pi`` keeps
that difference unambiguous even though ``r`` and ``xi`` are wrapped.
"""

import contextlib
from dataclasses import dataclass, field

import numpy as np

from .esprit import estimate_tone
from .flags import FAILURE_FLAGS, Flag
from .geometry import aoa_from_intermediates
from .pilots import SignMode, normalize_grid, normalize_ref


def wrap_phase(x):
    """Map to [-pi, pi)."""
    return (np.asarray(x) + np.pi) % (2 * np.pi) - np.pi


def circular_mean(phases):
    phases = np.asarray(phases, dtype=float)
    phases = phases[np.isfinite(phases)]
    if phases.size == 0:
        return np.nan
    return float(np.angle(np.sum(np.exp(1j * phases))))


@dataclass(frozen=True)
class AmbiguityPolicy:
    """How wrapped range-like phases are reported and checked.

    ``r`` and ``xi`` are only known modulo ``wrap_period`` metres; the
    difference ``xi - r`` must lie within ``radius * (1 + tolerance)``.
    """

    radius: float
    wavenumber_step: float = 1.0
    tolerance: float = 1e-3

    @property
    def wrap_period(self):
        return 2 * np.pi / self.wavenumber_step

    def describe(self):
        return (
            f"r and xi reported modulo {self.wrap_period:.6g} m; "
            f"|xi - r| <= {self.radius:.6g} m * (1 + {self.tolerance:g})"
        )


@dataclass(frozen=True)
class EstimatorConfig:
    sign_mode: SignMode = SignMode.GENIE
    subarray: int = None


@dataclass(frozen=True)
class EstimateReport:
    r_per_mode: np.ndarray
    gamma_per_carrier: np.ndarray
    r_wrapped: float
    gamma: float
    xi_wrapped: float
    delta: float
    phi: float
    theta: float
    policy: AmbiguityPolicy
    flags: frozenset = field(default_factory=frozenset)

    @property
    def failed(self):
        return bool(self.flags & FAILURE_FLAGS)

    @property
    def r_variance(self):
        """Sample variance of the per-mode range phases about their circular mean."""
        r = self.r_per_mode[np.isfinite(self.r_per_mode)]
        if r.size < 2:
            return np.nan
        return float(np.var(wrap_phase(r - self.r_wrapped), ddof=1))


def _has_pair(mask):
    return bool(np.any(mask[:-1] & mask[1:]))


def _tones(vectors, masks, subarray, counter):
    out = np.full(len(vectors), np.nan)
    flags = set()
    for i, (v, m) in enumerate(zip(vectors, masks)):
        if not _has_pair(m):
            continue
        est = estimate_tone(v, subarray=subarray, counter=counter)
        flags |= est.flags
        out[i] = est.phase
    return out, flags


def estimate_r(grid, subarray=None, counter=None):
    """Per-mode range phases and their circular mean.

    Returns:
        (r_per_mode, r_wrapped, flags). Modes without two adjacent usable
        subcarriers give NaN and are left out of the mean.
    """
    u_count = grid.values.shape[1]
    rows = [grid.row(u) for u in range(u_count)]
    r_u, flags = _tones(rows, grid.usable, subarray, counter)
    if not np.any(np.isfinite(r_u)):
        return r_u, np.nan, flags | {Flag.NO_USABLE_ROWS}
    return r_u, circular_mean(r_u), flags


def estimate_gamma(grid, subarray=None, counter=None):
    """Per-subcarrier ``gamma`` and their circular mean folded into [0, pi]."""
    p_count = grid.values.shape[2]
    cols = [grid.column(p) for p in range(p_count)]
    g_p, flags = _tones(cols, grid.usable.T, subarray, counter)
    if not np.any(np.isfinite(g_p)):
        return g_p, np.nan, flags | {Flag.NO_USABLE_COLUMNS}
    return g_p, abs(circular_mean(g_p)), flags


def estimate_xi(ref, subarray=None, counter=None):
    """Wrapped ``xi`` from the reference-element vector."""
    if not _has_pair(ref.usable):
        return np.nan, {Flag.NO_USABLE_REFERENCE}
    est = estimate_tone(ref.masked(), subarray=subarray, counter=counter)
    flags = set(est.flags)
    if not est.ok:
        flags.add(Flag.NO_USABLE_REFERENCE)
    return est.phase, flags


def recover_aoa(r_wrapped, gamma, xi_wrapped, policy):
    """Azimuth and elevation from the wrapped intermediates.

    Returns:
        (phi, theta, delta_m, flags) where ``delta_m`` is the resolved
        ``xi - r`` in metres.
    """
    delta = float(wrap_phase(xi_wrapped - r_wrapped)) / policy.wavenumber_step
    flags = set()
    if abs(delta) > policy.radius * (1 + policy.tolerance):
        flags.add(Flag.INCONSISTENT_INTERMEDIATES)
    sol = aoa_from_intermediates(0.0, gamma, delta, policy.radius)
    return sol.phi, sol.theta, delta, flags | sol.flags


def run_mf_mt_esprit(frame, pilots, sign_context, config=EstimatorConfig(), counter=None):
    """Full pipeline from a received frame to an ``EstimateReport``.

    Args:
        frame: ``channel.Frame`` with the combined grid and reference samples.
        pilots: the ``PilotBook`` used to synthesize the frame.
        sign_context: ``SignContext``; its ``radius_rx`` also sets the
            receive radius used in the inversion.
        config: sign mode and optional smoothing window.
        counter: optional ``OpCounter``; stages are ``r``, ``gamma``, ``xi``.
    """
    grid = normalize_grid(frame.grid, pilots, config.sign_mode, sign_context)
    ref = normalize_ref(frame.ref, pilots, config.sign_mode, sign_context)
    flags = set()
    for counts in (grid.flag_counts, ref.flag_counts):
        flags.update(f for f, n in counts.items() if n)

    stage = counter.stage if counter is not None else _null_stage
    with stage("r"):
        r_u, r_hat, f = estimate_r(grid, config.subarray, counter)
    flags |= f
    with stage("gamma"):
        g_p, g_hat, f = estimate_gamma(grid, config.subarray, counter)
    flags |= f
    with stage("xi"):
        xi_hat, f = estimate_xi(ref, config.subarray, counter)
    flags |= f

    step = frame.carriers.k[1] - frame.carriers.k[0] if len(frame.carriers) > 1 else 1.0
    policy = AmbiguityPolicy(sign_context.rx_radius, step)
    if flags & FAILURE_FLAGS:
        phi = theta = delta = np.nan
    else:
        phi, theta, delta, f = recover_aoa(r_hat, g_hat, xi_hat, policy)
        flags |= f
    return EstimateReport(r_u, g_p, r_hat, g_hat, xi_hat, delta, phi, theta, policy, frozenset(flags))


def _null_stage(name):
    return contextlib.nullcontext()
