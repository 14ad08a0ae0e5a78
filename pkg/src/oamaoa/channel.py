"""Multi-mode OAM signal synthesis over a misaligned UCA link.

Two fidelities are available. ``exact`` sums the scalar Green's function
``exp(i k d) / d`` over every transmit/receive element pair. ``approx`` uses
the far-field, large-N closed form

    x_m(l, k) = e^{i k R sin(theta) cos(phi - phi_m)} * A(l, k)
    A(l, k)   = -i^-l e^{i k r} / r * e^{i l gamma} J_l(k R sin(theta)) * s

and its sum over the receive ring, where a factor ``J_0(k R sin(theta))``
appears. All physical constants are folded into a unit normalization:
``mu0 * omega * d * N / (4 pi) = 1`` and the dipole current amplitude is 1,
so the exact per-pair weight is ``-1/N``.
"""

from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j
from .geometry import element_positions, gamma_from_aoa

FIDELITIES = ("exact", "approx")


def i_power(ell):
    """Exact ``1j ** ell`` for integer ``ell``."""
    return np.array([1.0, 1j, -1.0, -1j])[np.asarray(ell) % 4]


@dataclass(frozen=True)
class CarrierGrid:
    """Subcarrier wavenumbers (rad/m) with unit spacing."""

    wavenumbers: tuple

    def __post_init__(self):
        k = np.asarray(self.wavenumbers, dtype=float)
        if k.ndim != 1 or k.size < 1:
            raise ValueError("need at least one wavenumber")
        if k.size > 1 and np.any(np.abs(np.diff(k) - 1.0) > 1e-12):
            raise ValueError("wavenumbers must be increasing with unit spacing")
        object.__setattr__(self, "wavenumbers", tuple(float(v) for v in k))

    @classmethod
    def from_first(cls, k_first, count):
        return cls(tuple(k_first + np.arange(count)))

    @property
    def k(self):
        return np.asarray(self.wavenumbers)

    def __len__(self):
        return len(self.wavenumbers)


@dataclass(frozen=True)
class ModeSet:
    """Consecutive OAM mode numbers."""

    modes: tuple

    def __post_init__(self):
        m = tuple(int(v) for v in self.modes)
        if not m:
            raise ValueError("need at least one OAM mode")
        if any(b - a != 1 for a, b in zip(m, m[1:])):
            raise ValueError("OAM modes must be consecutive integers")
        object.__setattr__(self, "modes", m)

    @classmethod
    def span(cls, lo, hi):
        return cls(tuple(range(lo, hi + 1)))

    @property
    def ell(self):
        return np.asarray(self.modes)

    def index_of(self, mode):
        try:
            return self.modes.index(mode)
        except ValueError:
            raise ValueError(f"mode {mode} not in mode set {self.modes}") from None

    def __len__(self):
        return len(self.modes)


@dataclass(frozen=True)
class Frame:
    """One training frame.

    ``grid`` has shape (S, U, P): combined receive samples per snapshot, mode
    and subcarrier. ``ref`` has shape (S, P): reference-element samples on the
    zero mode.
    """

    grid: np.ndarray
    ref: np.ndarray
    modes: ModeSet
    carriers: CarrierGrid

    @property
    def snapshots(self):
        return self.grid.shape[0]


def field_exact_element(geom, mode, k, symbol=1.0, positions=None):
    """Per-receive-element samples from the direct Green's-function sum.

    Returns a length ``N_rx`` complex vector.
    """
    if positions is None:
        positions = element_positions(geom)
    d = positions.distances()
    tx_phase = np.exp(1j * mode * geom.tx.azimuths)
    green = np.exp(1j * k * d) / d
    return -(green @ tx_phase) * symbol / geom.tx.element_count


def field_approx_element(geom, mode, k, symbol=1.0):
    """Closed-form far-field per-element samples (length ``N_rx``)."""
    pose = geom.pose
    gamma = gamma_from_aoa(pose.phi, pose.theta)
    st = np.sin(pose.theta)
    amp = (
        -i_power(-mode)
        * np.exp(1j * k * pose.r)
        / pose.r
        * np.exp(1j * mode * gamma)
        * bessel_j(mode, k * geom.tx.radius * st)
        * symbol
    )
    steer = np.exp(1j * k * geom.rx.radius * st * np.cos(pose.phi - geom.rx.azimuths))
    return steer * amp


def received_combined(geom, mode, k, symbol=1.0, literal=False):
    """Sum of the approximate per-element samples over the receive ring.

    With ``literal=False`` the closed form with the ``J_0`` factor is used;
    ``literal=True`` sums ``field_approx_element`` directly.
    """
    if literal:
        return complex(field_approx_element(geom, mode, k, symbol).sum())
    pose = geom.pose
    gamma = gamma_from_aoa(pose.phi, pose.theta)
    st = np.sin(pose.theta)
    beta = -geom.rx.element_count * i_power(-mode) * symbol
    return complex(
        beta
        * np.exp(1j * k * pose.r)
        / pose.r
        * np.exp(1j * mode * gamma)
        * bessel_j(mode, k * geom.tx.radius * st)
        * bessel_j(0, k * geom.rx.radius * st)
    )


def combined_exact(geom, mode, k, symbol=1.0, positions=None):
    return complex(field_exact_element(geom, mode, k, symbol, positions).sum())


def ref_element_signal(geom, k, symbol=1.0, fidelity="approx", positions=None):
    """Reference receive element (azimuth 0) on the zero mode."""
    if fidelity == "approx":
        return complex(field_approx_element(geom, 0, k, symbol)[0])
    if fidelity == "exact":
        return complex(field_exact_element(geom, 0, k, symbol, positions)[0])
    raise ValueError(f"unknown channel fidelity {fidelity!r}")


def synthesize_frame(geom, modes, carriers, pilots, fidelity="approx", snapshots=1):
    """Noiseless training frame for every (mode, subcarrier) pilot.

    Raises:
        ValueError: if the zero mode is missing (no reference signal) or the
            mode count exceeds the transmit element count.
    """
    if fidelity not in FIDELITIES:
        raise ValueError(f"unknown channel fidelity {fidelity!r}")
    if len(modes) > geom.tx.element_count:
        raise ValueError("more OAM modes than transmit elements")
    u0 = modes.index_of(0)
    ks = carriers.k
    symbols = np.asarray(pilots.symbols)
    grid = np.empty((len(modes), len(ks)), dtype=complex)
    ref = np.empty(len(ks), dtype=complex)

    if fidelity == "approx":
        pose = geom.pose
        st = np.sin(pose.theta)
        gamma = gamma_from_aoa(pose.phi, pose.theta)
        j0 = bessel_j(0, ks * geom.rx.radius * st)
        common = np.exp(1j * ks * pose.r) / pose.r
        for u, ell in enumerate(modes.modes):
            jl = bessel_j(ell, ks * geom.tx.radius * st)
            grid[u] = (
                -geom.rx.element_count * i_power(-ell) * common * np.exp(1j * ell * gamma) * jl * j0
            )
        ref_phase = np.exp(1j * ks * geom.rx.radius * st * np.cos(pose.phi))
        ref[:] = -ref_phase * common * bessel_j(0, ks * geom.tx.radius * st)
    else:
        positions = element_positions(geom)
        d = positions.distances()
        for p, k in enumerate(ks):
            green = np.exp(1j * k * d) / d
            for u, ell in enumerate(modes.modes):
                x = -(green @ np.exp(1j * ell * geom.tx.azimuths)) / geom.tx.element_count
                grid[u, p] = x.sum()
                if ell == 0:
                    ref[p] = x[0]
    grid = grid * symbols
    ref = ref * symbols[u0]
    return Frame(
        np.broadcast_to(grid, (snapshots,) + grid.shape).copy(),
        np.broadcast_to(ref, (snapshots,) + ref.shape).copy(),
        modes,
        carriers,
    )


def add_awgn(samples, snr_db, rng):
    """Add circular complex Gaussian noise at ``snr_db`` relative to mean sample power.

    ``snr_db = inf`` returns an unchanged copy.
    """
    x = np.asarray(samples, dtype=complex)
    if x.size == 0:
        raise ValueError("cannot add noise to an empty collection")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    if np.isposinf(snr_db):
        return x.copy()
    power = np.mean(np.abs(x) ** 2)
    sigma2 = power / 10.0 ** (snr_db / 10.0)
    noise = rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)
    return x + np.sqrt(sigma2 / 2.0) * noise


def noisy_frame(frame, snr_db, rng):
    """Independent noise on the combined grid and on the reference samples."""
    return Frame(add_awgn(frame.grid, snr_db, rng), add_awgn(frame.ref, snr_db, rng), frame.modes, frame.carriers)
