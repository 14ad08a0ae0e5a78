"""Single-tone ESPRIT: covariance, principal eigenpair, shift-invariance phase.

A snapshot set is an (S, L) complex array. With one snapshot the covariance
path reduces algebraically to ``arg(x[:-1]^H x[1:])`` on the raw vector.
"""

import contextlib
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .flags import Flag

ZERO_SUBVECTOR_TOL = 1e-14
RESIDUAL_TOL = 1e-9
_RESTART_SEED = 0x5EED


class ZeroSubvectorError(ValueError):
    pass


class OpCounter:
    """Tally of complex multiply-accumulates, bucketed by pipeline stage."""

    def __init__(self):
        self.macs = defaultdict(int)
        self._stage = "other"

    @contextlib.contextmanager
    def stage(self, name):
        previous, self._stage = self._stage, name
        try:
            yield self
        finally:
            self._stage = previous

    def add(self, n):
        self.macs[self._stage] += int(n)

    @property
    def total(self):
        return sum(self.macs.values())


def _count(counter, n):
    if counter is not None:
        counter.add(n)


def as_snapshots(x):
    x = np.asarray(x, dtype=complex)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2:
        raise ValueError(f"snapshots must be 1-D or 2-D, got shape {x.shape}")
    if x.shape[0] < 1 or x.shape[1] < 2:
        raise ValueError("need at least one snapshot of length >= 2")
    return x


def sample_covariance(snapshots, counter=None):
    """``(1/S) sum_s x_s x_s^H``."""
    x = as_snapshots(snapshots)
    s, length = x.shape
    _count(counter, s * length * length)
    return x.T @ x.conj() / s


def forward_smoothed_covariance(snapshots, subarray, counter=None):
    """Average covariance of all length-``subarray`` windows of every snapshot."""
    x = as_snapshots(snapshots)
    length = x.shape[1]
    if not 2 <= subarray <= length:
        raise ValueError(f"subarray length {subarray} outside [2, {length}]")
    windows = np.lib.stride_tricks.sliding_window_view(x, subarray, axis=1)
    return sample_covariance(windows.reshape(-1, subarray), counter)


@dataclass(frozen=True)
class PrincipalPair:
    value: float
    vector: np.ndarray
    iterations: int
    flags: frozenset


def _power(matrix, start, tol, max_iter, counter):
    length = matrix.shape[0]
    scale = np.linalg.norm(matrix)
    v = start / np.linalg.norm(start)
    lam_old = None
    restarted = False
    for it in range(1, max_iter + 1):
        w = matrix @ v
        _count(counter, length * length)
        lam = float(np.real(np.vdot(v, w)))
        nw = np.linalg.norm(w)
        residual = np.linalg.norm(w - lam * v)
        _count(counter, 3 * length)
        if nw <= 1e-10 * scale:
            if restarted:
                return lam, v, it, False
            # start vector orthogonal to the dominant subspace
            rng = np.random.default_rng(_RESTART_SEED)
            v = rng.standard_normal(length) + 1j * rng.standard_normal(length)
            v /= np.linalg.norm(v)
            restarted, lam_old = True, None
            continue
        v = w / nw
        # the quotient settles quadratically faster than the vector, so the
        # residual is checked too
        if lam_old is not None and abs(lam - lam_old) <= tol * abs(lam) and residual <= RESIDUAL_TOL * abs(lam):
            return lam, v, it, True
        lam_old = lam
    return lam, v, max_iter, False


def principal_eigenvector(matrix, tol=1e-12, max_iter=1000, counter=None):
    """Dominant eigenpair of a Hermitian PSD matrix by power iteration.

    Starts from the normalized all-ones vector and restarts once from a fixed
    seed if that start is orthogonal to the dominant subspace. A second,
    deflated iteration estimates the runner-up eigenvalue when the trace leaves
    room for a tie; a relative gap below ``tol`` is flagged
    ``DegenerateSpectrum``. Convergence also requires the eigen-residual
    ``||R v - lam v||`` to fall below ``RESIDUAL_TOL * lam``.

    Raises:
        ValueError: for non-square or all-zero input.
    """
    r = np.asarray(matrix, dtype=complex)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ValueError("covariance must be square")
    if not np.any(r):
        raise ValueError("covariance is identically zero")
    length = r.shape[0]
    flags = set()
    lam, q, iterations, converged = _power(r, np.ones(length, dtype=complex), tol, max_iter, counter)
    if not converged:
        flags.add(Flag.NO_CONVERGENCE)
    # the Rayleigh quotient of the returned vector, not the previous iterate
    lam = float(np.real(np.vdot(q, r @ q)))
    _count(counter, length * length + length)

    trace = float(np.real(np.trace(r)))
    if length > 1 and trace - lam >= lam * (1.0 - 1e-9):
        deflated = r - lam * np.outer(q, q.conj())
        start = np.ones(length, dtype=complex) - q * np.vdot(q, np.ones(length))
        if np.linalg.norm(start) < 1e-12:
            rng = np.random.default_rng(_RESTART_SEED)
            start = rng.standard_normal(length) + 1j * rng.standard_normal(length)
        lam2, _, _, _ = _power(deflated, start, tol, max_iter, counter)
        if abs(lam - lam2) < tol * lam:
            flags.add(Flag.DEGENERATE_SPECTRUM)
    return PrincipalPair(lam, q, iterations, frozenset(flags))


def invariance_phase(q, counter=None):
    """Phase of the rotation mapping the first L-1 entries onto the last L-1.

    Returns a value in (-pi, pi].

    Raises:
        ZeroSubvectorError: when the leading subvector is numerically zero.
    """
    q = np.asarray(q, dtype=complex)
    if q.ndim != 1 or q.size < 2:
        raise ValueError("need a vector of length >= 2")
    q1, q2 = q[:-1], q[1:]
    energy = float(np.real(np.vdot(q1, q1)))
    if np.sqrt(energy) < ZERO_SUBVECTOR_TOL:
        raise ZeroSubvectorError("leading subvector is zero")
    _count(counter, 2 * q1.size)
    phase = float(np.angle(np.vdot(q1, q2) / energy))
    return np.pi if phase <= -np.pi else phase


@dataclass(frozen=True)
class ToneEstimate:
    phase: float
    flags: frozenset

    @property
    def ok(self):
        return np.isfinite(self.phase)


def estimate_tone(snapshots, subarray=None, tol=1e-12, max_iter=1000, counter=None):
    """Phase step of a single complex tone.

    Args:
        snapshots: (S, L) or (L,) samples; entries zeroed by the caller are
            treated as missing.
        subarray: forward-smoothing window length; ``None`` disables smoothing.

    Returns:
        ``ToneEstimate``; the phase is NaN when the estimate is unusable
        (degenerate spectrum or zero subvector).
    """
    x = as_snapshots(snapshots)
    if subarray is None:
        cov = sample_covariance(x, counter)
    else:
        cov = forward_smoothed_covariance(x, subarray, counter)
    if not np.any(cov):
        return ToneEstimate(np.nan, frozenset({Flag.ZERO_SUBVECTOR}))
    pair = principal_eigenvector(cov, tol, max_iter, counter)
    if Flag.DEGENERATE_SPECTRUM in pair.flags:
        return ToneEstimate(np.nan, pair.flags)
    try:
        phase = invariance_phase(pair.vector, counter)
    except ZeroSubvectorError:
        return ToneEstimate(np.nan, pair.flags | {Flag.ZERO_SUBVECTOR})
    return ToneEstimate(phase, pair.flags)


def direct_tone_phase(x):
    """Least-squares phase step on a single raw vector (no covariance)."""
    x = np.asarray(x, dtype=complex)
    return float(np.angle(np.vdot(x[:-1], x[1:]) / np.vdot(x[:-1], x[:-1])))
