"""UCA layouts, the misalignment pose, and the angle relations of the link.

Conventions
-----------
Everything lives in the receiver frame: the receive UCA is centred at the
origin in the x-y plane. With elevation ``theta`` and azimuth ``phi``,

    u = (sin(theta) cos(phi), sin(theta) sin(phi), cos(theta))

is the propagation direction and the transmit UCA centre sits at ``-r * u``,
so the reference element (azimuth 0) is ``R sin(theta) cos(phi)`` farther
from the transmitter than the receive centre.
"""

from dataclasses import dataclass

import numpy as np

from .flags import Flag

GAMMA_DEGENERATE_TOL = 1e-12
RADICAND_TOL = 1e-6


@dataclass(frozen=True)
class UcaLayout:
    """``element_count`` antennas evenly spaced on a circle of ``radius`` metres."""

    element_count: int
    radius: float

    def __post_init__(self):
        if int(self.element_count) != self.element_count or self.element_count < 1:
            raise ValueError(f"element_count must be a positive integer, got {self.element_count}")
        if not np.isfinite(self.radius) or self.radius < 0:
            raise ValueError(f"radius must be finite and non-negative, got {self.radius}")
        if self.radius == 0 and self.element_count > 1:
            raise ValueError("a zero radius only makes sense for a single element")

    @property
    def azimuths(self):
        n = np.arange(self.element_count)
        return 2.0 * np.pi * n / self.element_count

    def planar_positions(self):
        """(N, 2) element coordinates in the array's own plane."""
        a = self.azimuths
        return self.radius * np.stack([np.cos(a), np.sin(a)], axis=1)


@dataclass(frozen=True)
class MisalignmentPose:
    """Range (m), azimuth and elevation (rad) of the transmitter seen from the receiver."""

    r: float
    phi: float
    theta: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"range must be positive, got {self.r}")
        if not 0.0 <= self.theta < np.pi / 2:
            raise ValueError(f"elevation {self.theta} outside [0, pi/2)")
        if not 0.0 <= self.phi < np.pi / 2:
            raise ValueError(f"azimuth {self.phi} outside [0, pi/2)")

    @classmethod
    def from_degrees(cls, r, phi_deg, theta_deg):
        return cls(r, np.deg2rad(phi_deg), np.deg2rad(theta_deg))

    @property
    def direction(self):
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


@dataclass(frozen=True)
class LinkGeometry:
    tx: UcaLayout
    rx: UcaLayout
    pose: MisalignmentPose

    @classmethod
    def symmetric(cls, element_count, radius, pose):
        layout = UcaLayout(element_count, radius)
        return cls(layout, layout, pose)

    def aligned(self):
        """Same arrays and range with the axes brought into line."""
        return LinkGeometry(self.tx, self.rx, MisalignmentPose(self.pose.r, 0.0, 0.0))

    @property
    def derived(self):
        p = self.pose
        return DerivedAngles(gamma_from_aoa(p.phi, p.theta), xi_from_pose(p, self.rx.radius))


@dataclass(frozen=True)
class DerivedAngles:
    gamma: float
    xi: float


@dataclass(frozen=True)
class ElementPositions:
    """Element coordinates of both rings in the receiver frame.

    ``tx_basis`` rows are the transmit-frame unit vectors (x', y', z').
    """

    tx: np.ndarray
    rx: np.ndarray
    tx_center: np.ndarray
    tx_basis: np.ndarray

    def distances(self):
        """(N_rx, N_tx) matrix of element-pair distances."""
        return np.linalg.norm(self.rx[:, None, :] - self.tx[None, :, :], axis=2)

    def in_transmit_frame(self):
        """The same configuration re-expressed with the transmit centre as origin."""
        to_tx = lambda p: (p - self.tx_center) @ self.tx_basis.T  # noqa: E731
        return ElementPositions(to_tx(self.tx), to_tx(self.rx), np.zeros(3), np.eye(3))


def gamma_from_aoa(phi, theta):
    """Angle between the transmit x'-axis and the receiver-parallel x-axis."""
    c = np.clip(np.cos(theta) * np.cos(phi), -1.0, 1.0)
    return np.arccos(c)


def xi_from_pose(pose, radius):
    """Path length to the reference receive element, ``r + R sin(theta) cos(phi)``."""
    return pose.r + radius * np.sin(pose.theta) * np.cos(pose.phi)


@dataclass(frozen=True)
class AoaSolution:
    phi: float
    theta: float
    radicand: float
    flags: frozenset


def aoa_from_intermediates(r_hat, gamma_hat, xi_hat, radius):
    """Invert ``(r, gamma, xi)`` back to azimuth and elevation.

    Only the difference ``xi_hat - r_hat`` matters, so wrapped phases work as
    long as both carry the same wrap. The radicand is clamped to [0, 1]; it is
    flagged when it exceeds 1 by more than ``RADICAND_TOL``.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    flags = set()
    offset = (xi_hat - r_hat) / radius
    cos_gamma = np.cos(gamma_hat)
    radicand = offset * offset + cos_gamma * cos_gamma
    if radicand > 1.0 + RADICAND_TOL:
        flags.add(Flag.RADICAND_OVERFLOW)
    phi = float(np.arccos(np.sqrt(np.clip(radicand, 0.0, 1.0))))
    if abs(cos_gamma) < GAMMA_DEGENERATE_TOL:
        flags.add(Flag.GAMMA_DEGENERATE)
        theta = np.pi / 2
    else:
        theta = float(np.clip(np.arctan2(offset, cos_gamma), 0.0, np.pi / 2))
    return AoaSolution(phi, theta, float(radicand), frozenset(flags))


def _reference_transmit_basis(pose):
    # x' satisfies x'.x = cos(gamma) (the gamma relation) and the propagation
    # direction projects onto the transmit plane with length sin(theta) at
    # azimuth gamma, so the far-field array factor is exactly
    # i^-l e^{i l gamma} J_l(k R sin(theta)).
    u = pose.direction
    st, ct = np.sin(pose.theta), np.cos(pose.theta)
    sp, cp = np.sin(pose.phi), np.cos(pose.phi)
    gamma = gamma_from_aoa(pose.phi, pose.theta)
    a = ct * cp
    rho = np.sqrt(max(0.0, 1.0 - a * a))
    # (b, c) = rho (cos t, sin t) on the line  st sp b + ct c = st ct cp (1 - cp)
    lin_b, lin_c = st * sp, ct
    rhs = st * ct * cp * (1.0 - cp)
    if rho > 0:
        t0 = np.arctan2(lin_c, lin_b)
        t = t0 + np.arccos(np.clip(rhs / (np.hypot(lin_b, lin_c) * rho), -1.0, 1.0))
        x_axis = np.array([a, rho * np.cos(t), rho * np.sin(t)])
    else:
        x_axis = np.array([1.0, 0.0, 0.0])

    u_perp = u - (u @ x_axis) * x_axis
    norm_perp = np.linalg.norm(u_perp)
    e1 = u_perp / norm_perp
    e2 = np.cross(x_axis, e1)
    alpha = np.clip(st * np.sin(gamma) / norm_perp, -1.0, 1.0)
    beta = np.sqrt(1.0 - alpha * alpha)
    y_axis = alpha * e1 + beta * e2
    if np.cross(x_axis, y_axis) @ u < 0:
        y_axis = alpha * e1 - beta * e2
    return np.stack([x_axis, y_axis, np.cross(x_axis, y_axis)])


def _boresight_transmit_basis(pose):
    # Minimal rotation taking z onto the propagation direction.
    u = pose.direction
    z = np.array([0.0, 0.0, 1.0])
    axis = np.cross(z, u)
    s = np.linalg.norm(axis)
    if s < 1e-15:
        return np.eye(3)
    axis = axis / s
    c = u @ z
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    rot = np.eye(3) + s * k + (1 - c) * (k @ k)
    return rot.T


def element_positions(geom, frame="reference"):
    """Place both rings in the receiver frame.

    Args:
        geom: link geometry.
        frame: ``"reference"`` orients the transmit ring so that the far-field
            channel reduces to the closed-form Bessel model; ``"boresight"``
            points the transmit axis straight at the receive centre, leaving
            only the receive tilt (used by the capacity study).
    """
    pose = geom.pose
    if frame == "reference":
        basis = _reference_transmit_basis(pose)
    elif frame == "boresight":
        basis = _boresight_transmit_basis(pose)
    else:
        raise ValueError(f"unknown frame {frame!r}")
    center = -pose.r * pose.direction
    tx_planar = geom.tx.planar_positions()
    tx = center + tx_planar[:, :1] * basis[0] + tx_planar[:, 1:] * basis[1]
    rx_planar = geom.rx.planar_positions()
    rx = np.column_stack([rx_planar, np.zeros(geom.rx.element_count)])
    return ElementPositions(tx, rx, center, basis)
