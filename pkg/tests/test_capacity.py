import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oamaoa.capacity import (
    CapacityModel,
    beam_steer,
    capacity,
    effective_channel,
    element_channel,
    oam_matrix,
)
from oamaoa.geometry import LinkGeometry, MisalignmentPose, UcaLayout


@pytest.fixture(scope="module")
def model(config, geom):
    return CapacityModel(geom, config.modes(), config.carriers())


class TestCapacityFormula:
    def test_one_bit(self):
        assert capacity(np.eye(1), 0.0) == pytest.approx(1.0, rel=1e-14)

    @settings(max_examples=50)
    @given(st.integers(1, 12), st.floats(-10.0, 40.0))
    def test_identity(self, u, snr_db):
        rho = 10 ** (snr_db / 10)
        assert capacity(np.eye(u), snr_db) == pytest.approx(u * np.log2(1 + rho / u), rel=1e-12)

    def test_average_over_subcarriers(self):
        h = np.stack([np.eye(2), 2 * np.eye(2)])
        expected = 0.5 * (capacity(np.eye(2), 10.0) + capacity(2 * np.eye(2), 10.0))
        assert capacity(h, 10.0) == pytest.approx(expected, rel=1e-14)

    def test_unitary_invariance(self, rng):
        h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        assert capacity(q @ h, 15.0) == pytest.approx(capacity(h, 15.0), rel=1e-12)

    def test_rejects(self):
        with pytest.raises(ValueError):
            capacity(np.ones((2, 3)), 0.0)
        with pytest.raises(ValueError):
            capacity(np.array([[np.inf]]), 0.0)


class TestChannels:
    def test_oam_columns_orthonormal(self):
        w = oam_matrix(UcaLayout(9, 1.0), range(-4, 4))
        np.testing.assert_allclose(w.conj().T @ w, np.eye(8), atol=1e-14)

    def test_steering_with_zero_is_identity(self, geom):
        h = element_channel(geom, 50.0)
        assert np.array_equal(beam_steer(h, 0.0, 0.0, 50.0, geom.rx), h)

    def test_aligned_channel_is_circulant(self, geom):
        h = effective_channel(element_channel(geom.aligned(), 48.0), geom, range(-4, 4))
        off = h - np.diag(np.diag(h))
        assert np.abs(off).max() < 1e-12 * np.abs(h).max()

    def test_unknown_fidelity(self, geom):
        with pytest.raises(ValueError):
            element_channel(geom, 47.0, "ray")


class TestModel:
    def test_normalization(self, model):
        np.testing.assert_allclose(np.sum(np.abs(model.aligned) ** 2, axis=(1, 2)), 8.0, rtol=1e-12)

    def test_true_steering_recovers_alignment(self, model):
        for snr in (0.0, 20.0):
            assert capacity(model.steered_true(), snr) == pytest.approx(capacity(model.aligned, snr), rel=1e-9)

    def test_aligned_beats_misaligned(self, model):
        assert capacity(model.aligned, 20.0) > capacity(model.misaligned, 20.0)

    def test_steering_error_costs_capacity(self, model):
        true = capacity(model.steered_true(), 20.0)
        off = capacity(model.steered(np.deg2rad(7), np.deg2rad(9)), 20.0)
        assert capacity(model.misaligned, 20.0) < off < true

    def test_aligned_pose_curves_coincide(self, config):
        geom = LinkGeometry.symmetric(9, config.array_radius, MisalignmentPose(40.0, 0.0, 0.0))
        m = CapacityModel(geom, config.modes(), config.carriers())
        caps = [capacity(h, 20.0) for h in (m.aligned, m.misaligned, m.steered_true(), m.steered(0.0, 0.0))]
        assert np.ptp(caps) < 1e-9 * caps[0]

    def test_exact_fidelity_close_to_alignment(self, config, geom):
        m = CapacityModel(geom, config.modes(), config.carriers(), fidelity="exact")
        aligned = capacity(m.aligned, 20.0)
        assert capacity(m.steered_true(), 20.0) == pytest.approx(aligned, rel=1e-2)
        assert capacity(m.misaligned, 20.0) < aligned
