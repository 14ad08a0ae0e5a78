"""Mode-domain channel capacity and phase-conjugate receive beam steering.

The per-element channel from transmit element n to receive element m is the
scalar Green's function between the two rings:

* ``approx``: the coaxial (aligned) channel times the receive-tilt phase
  ``exp(i k R sin(theta) cos(phi - phi_m))``;
* ``exact``: the Green's function with the transmit axis pointed at the
  receive centre and the receive ring tilted by (phi, theta).

Steering multiplies receive element m by the conjugate tilt phase for the
estimated angles. It is exact on the ``approx`` channel. This is a
simplified steering scheme, not an optimal beamformer.
"""

import numpy as np

from .geometry import element_positions

FIDELITIES = ("exact", "approx")


def oam_matrix(layout, modes):
    """(N, U) unitary-column OAM (phase-gradient) matrix for the given modes."""
    ell = np.asarray(getattr(modes, "modes", modes))
    return np.exp(1j * np.outer(layout.azimuths, ell)) / np.sqrt(layout.element_count)


def green_channel(positions, k):
    d = positions.distances()
    return np.exp(1j * k * d) / d


def tilt_phase(layout, k, phi, theta):
    return np.exp(1j * k * layout.radius * np.sin(theta) * np.cos(phi - layout.azimuths))


def element_channel(geom, k, fidelity="approx"):
    """(N_rx, N_tx) per-element channel at wavenumber ``k``."""
    if fidelity == "approx":
        aligned = green_channel(element_positions(geom.aligned()), k)
        return tilt_phase(geom.rx, k, geom.pose.phi, geom.pose.theta)[:, None] * aligned
    if fidelity == "exact":
        return green_channel(element_positions(geom, frame="boresight"), k)
    raise ValueError(f"unknown channel fidelity {fidelity!r}")


def beam_steer(channel, phi_hat, theta_hat, k, rx_layout):
    """Remove the receive-tilt phase predicted by the estimated angles."""
    return np.conj(tilt_phase(rx_layout, k, phi_hat, theta_hat))[:, None] * np.asarray(channel)


def effective_channel(channel, geom, modes):
    """``W_rx^H H W_tx`` restricted to the mode set."""
    w_tx = oam_matrix(geom.tx, modes)
    w_rx = oam_matrix(geom.rx, modes)
    return w_rx.conj().T @ channel @ w_tx


def capacity(h_eff, snr_db):
    """Equal-power log-det capacity in bit/s/Hz, averaged over subcarriers.

    Args:
        h_eff: (U, U) or (P, U, U) effective mode-domain channel.
        snr_db: total transmit SNR; each of the U modes gets ``rho / U``.
    """
    h = np.asarray(h_eff, dtype=complex)
    if h.ndim == 2:
        h = h[None]
    if h.ndim != 3 or h.shape[1] != h.shape[2]:
        raise ValueError(f"effective channel must be square, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("effective channel has non-finite entries")
    if not np.isfinite(snr_db):
        raise ValueError(f"capacity needs a finite SNR, got {snr_db}")
    u = h.shape[1]
    rho = 10.0 ** (snr_db / 10.0)
    gram = h @ np.conj(np.swapaxes(h, 1, 2))
    _, logdet = np.linalg.slogdet(np.eye(u) + (rho / u) * gram)
    return float(np.mean(logdet) / np.log(2.0))


class CapacityModel:
    """Per-subcarrier effective channels for one link, normalized to the aligned link.

    Each subcarrier is scaled so that the aligned effective channel has
    squared Frobenius norm U; the same scale applies to every variant.
    """

    def __init__(self, geom, modes, carriers, fidelity="approx"):
        self.geom = geom
        self.modes = modes
        self.ks = np.asarray(carriers.k)
        self.fidelity = fidelity
        u = len(modes)
        aligned = [effective_channel(element_channel(geom.aligned(), k, fidelity), geom, modes) for k in self.ks]
        self.scale = np.array([np.sqrt(u) / np.linalg.norm(h) for h in aligned])
        self.aligned = np.stack([s * h for s, h in zip(self.scale, aligned)])
        self._raw = [element_channel(geom, k, fidelity) for k in self.ks]
        self.misaligned = self._effective(self._raw)

    def _effective(self, channels):
        return np.stack(
            [s * effective_channel(h, self.geom, self.modes) for s, h in zip(self.scale, channels)]
        )

    def steered(self, phi_hat, theta_hat):
        rx = self.geom.rx
        return self._effective(
            [beam_steer(h, phi_hat, theta_hat, k, rx) for h, k in zip(self._raw, self.ks)]
        )

    def steered_true(self):
        return self.steered(self.geom.pose.phi, self.geom.pose.theta)
