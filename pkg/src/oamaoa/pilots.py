"""Training pilots and the normalization that exposes the pure exponentials.

After normalization every usable grid entry is ``e^{i k r} e^{i l gamma}``
plus noise, and every usable reference entry is ``e^{i k xi}`` plus noise.
The real Bessel amplitude carries a sign the receiver must undo; how it gets
that sign is the ``SignMode``.
"""

import enum
import functools
from dataclasses import dataclass, field

import numpy as np

from .bessel import bessel_j
from .channel import i_power
from .flags import Flag

NULL_SAMPLE_TOL = 1e-300
SIGN_INDETERMINATE_TOL = 1e-12


class SignMode(str, enum.Enum):
    GENIE = "genie"
    PRIOR = "prior"
    NONE = "none"


@dataclass(frozen=True)
class SignContext:
    """What the receiver knows about the elevation when undoing Bessel signs.

    Attributes:
        radius_tx: transmit UCA radius (m).
        radius_rx: receive UCA radius (m); defaults to ``radius_tx``.
        theta_true: true elevation, used by ``SignMode.GENIE``.
        main_lobe: (low, high) elevation range in radians; ``SignMode.PRIOR``
            uses its midpoint.
    """

    radius_tx: float
    radius_rx: float = None
    theta_true: float = None
    main_lobe: tuple = None

    @property
    def rx_radius(self):
        return self.radius_tx if self.radius_rx is None else self.radius_rx

    def theta_reference(self, mode):
        mode = SignMode(mode)
        if mode is SignMode.GENIE:
            if self.theta_true is None:
                raise ValueError("genie sign mode needs the true elevation")
            return self.theta_true
        if mode is SignMode.PRIOR:
            if self.main_lobe is None:
                raise ValueError("prior sign mode needs a main-lobe range")
            lo, hi = self.main_lobe
            return 0.5 * (lo + hi)
        return None


@dataclass(frozen=True)
class PilotBook:
    symbols: np.ndarray
    modes: tuple
    wavenumbers: tuple

    def row(self, mode):
        if mode not in self.modes:
            raise ValueError(f"pilot book has no mode {mode}")
        return self.symbols[self.modes.index(mode)]


@dataclass(frozen=True)
class NormalizedGrid:
    """Normalized samples with shape (S, U, P) and a (U, P) usable mask."""

    values: np.ndarray
    usable: np.ndarray
    modes: tuple
    wavenumbers: tuple
    flag_counts: dict = field(default_factory=dict)

    def row(self, u):
        """Snapshots of the u-th mode across subcarriers, zeroed where unusable."""
        return np.where(self.usable[u], self.values[:, u, :], 0.0)

    def column(self, p):
        return np.where(self.usable[:, p], self.values[:, :, p], 0.0)


@dataclass(frozen=True)
class RefVector:
    """Normalized reference-element samples with shape (S, P)."""

    values: np.ndarray
    usable: np.ndarray
    flag_counts: dict = field(default_factory=dict)

    def masked(self):
        return np.where(self.usable, self.values, 0.0)


def generate_pilots(modes, carriers, rng):
    """Uniform QPSK pilots, one per (mode, subcarrier)."""
    q = rng.integers(0, 4, size=(len(modes), len(carriers)))
    symbols = np.exp(1j * (np.pi / 4 + np.pi / 2 * q))
    return PilotBook(symbols, tuple(modes.modes), tuple(carriers.wavenumbers))


def bessel_product(mode, k, radius_tx, radius_rx, theta):
    st = np.sin(theta)
    return bessel_j(mode, k * radius_tx * st) * bessel_j(0, k * radius_rx * st)


def sign_compensation(mode, k, sign_mode, context, reference=False):
    """Sign of the real Bessel amplitude for one or more subcarriers.

    For combined samples the amplitude is ``J_l(k R_tx s) J_0(k R_rx s)``;
    for the reference element (``reference=True``) it is ``J_0(k R_tx s)``,
    with ``s = sin(theta_ref)``.

    Returns:
        (sign, indeterminate): arrays shaped like ``k``. ``indeterminate`` is
        set where the amplitude is within ``SIGN_INDETERMINATE_TOL`` of zero.
    """
    k = np.asarray(k, dtype=float)
    theta = context.theta_reference(sign_mode)
    if theta is None:
        return np.ones_like(k), np.zeros(k.shape, dtype=bool)
    if reference:
        amp = bessel_j(0, k * context.radius_tx * np.sin(theta))
    else:
        amp = bessel_product(mode, k, context.radius_tx, context.rx_radius, theta)
    amp = np.asarray(amp)
    return np.where(amp < 0, -1.0, 1.0), np.abs(amp) < SIGN_INDETERMINATE_TOL


@functools.lru_cache(maxsize=64)
def _sign_table(modes, wavenumbers, sign_mode, context, reference=False):
    """Read-only (U, P) sign and indeterminate tables; they depend only on the grid."""
    k = np.asarray(wavenumbers, dtype=float)
    sign = np.ones((len(modes), len(k)))
    indeterminate = np.zeros((len(modes), len(k)), dtype=bool)
    for u, mode in enumerate(modes):
        sign[u], indeterminate[u] = sign_compensation(mode, k, sign_mode, context, reference)
    sign.flags.writeable = indeterminate.flags.writeable = False
    return sign, indeterminate


def _strip(received, symbols, mode_phase, sign):
    mag = np.abs(received)
    null = np.any(mag < NULL_SAMPLE_TOL, axis=0)
    safe = np.where(mag < NULL_SAMPLE_TOL, 1.0, mag)
    # the leading minus undoes the negative real amplitude constant
    out = -(received / safe) * (np.conj(symbols) / np.abs(symbols)) * mode_phase * sign
    return out, null


def normalize_grid(received, pilots, sign_mode, context):
    """Strip pilots, mode phase ``i^-l`` and the Bessel sign from combined samples.

    Args:
        received: (S, U, P) or (U, P) complex samples.
        pilots: matching ``PilotBook``.
        sign_mode: ``SignMode`` (or its string value).
        context: ``SignContext``.
    """
    x = np.asarray(received, dtype=complex)
    if x.ndim == 2:
        x = x[None]
    symbols = np.asarray(pilots.symbols)
    if x.shape[1:] != symbols.shape:
        raise ValueError(f"received grid {x.shape[1:]} does not match pilots {symbols.shape}")
    ell = np.asarray(pilots.modes)[:, None]
    sign, indeterminate = _sign_table(tuple(pilots.modes), tuple(pilots.wavenumbers), SignMode(sign_mode), context)
    values, null = _strip(x, symbols, i_power(ell), sign)
    usable = ~(null | indeterminate)
    counts = {Flag.NULL_SAMPLE: int(null.sum()), Flag.SIGN_INDETERMINATE: int(indeterminate.sum())}
    return NormalizedGrid(values, usable, tuple(pilots.modes), tuple(pilots.wavenumbers), counts)


def normalize_ref(samples, pilots, sign_mode, context):
    """Normalize reference-element samples ``x_1(0, k_p)`` into ``e^{i k xi}``."""
    x = np.asarray(samples, dtype=complex)
    if x.ndim == 1:
        x = x[None]
    symbols = np.asarray(pilots.row(0))
    if x.shape[1:] != symbols.shape:
        raise ValueError(f"reference samples {x.shape[1:]} do not match pilots {symbols.shape}")
    sign, indeterminate = _sign_table((0,), tuple(pilots.wavenumbers), SignMode(sign_mode), context, True)
    sign, indeterminate = sign[0], indeterminate[0]
    values, null = _strip(x, symbols, 1.0, sign)
    usable = ~(null | indeterminate)
    counts = {Flag.NULL_SAMPLE: int(null.sum()), Flag.SIGN_INDETERMINATE: int(indeterminate.sum())}
    return RefVector(values, usable, counts)
