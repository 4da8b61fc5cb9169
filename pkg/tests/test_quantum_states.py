"""State factories: normalization, moments, seam behavior."""

import numpy as np
import pytest

from molrest.lie_so3 import exp_map, log_map
from molrest.quantum import (
    LineGrid,
    So3Grid,
    gaussian_line_state,
    geodesic_distance,
    oscillator_state,
    random_line_state,
    random_so3_state,
    so3_gaussian_state,
)


@pytest.fixture(scope="module")
def line():
    return LineGrid.make(-10.0, 10.0, 2048)


@pytest.fixture(scope="module")
def ball():
    return So3Grid.make(32, 48)


class TestLineStates:
    def test_gaussian_normalized(self, line):
        assert abs(gaussian_line_state(line, 0.3, 0.7, 1.1).norm() - 1.0) <= 1e-12

    def test_gaussian_position_moments(self, line):
        psi = gaussian_line_state(line, center=-1.2, sigma=0.6)
        w, x, a = psi.weights, line.points, psi.amplitudes
        mean = np.sum(w * x * np.abs(a) ** 2)
        var = np.sum(w * (x - mean) ** 2 * np.abs(a) ** 2)
        assert abs(mean - -1.2) <= 1e-10
        assert abs(np.sqrt(var) - 0.6) <= 1e-10

    def test_gaussian_rejects_bad_sigma(self, line):
        with pytest.raises(ValueError):
            gaussian_line_state(line, sigma=0.0)

    def test_oscillator_orthonormal(self, line):
        states = [oscillator_state(line, n) for n in range(5)]
        for i, si in enumerate(states):
            for j, sj in enumerate(states):
                overlap = np.sum(si.weights * np.conj(si.amplitudes) * sj.amplitudes)
                assert abs(overlap - (1.0 if i == j else 0.0)) <= 1e-10

    def test_oscillator_node_count(self, line):
        # eigenstate n has n sign changes
        psi = oscillator_state(line, 3)
        vals = psi.amplitudes.real
        core = vals[np.abs(vals) > 1e-6 * np.abs(vals).max()]
        assert int(np.sum(np.diff(np.sign(core)) != 0)) == 3

    def test_oscillator_rejects_negative_n(self, line):
        with pytest.raises(ValueError):
            oscillator_state(line, -1)

    def test_random_states_normalized_and_decayed(self, line):
        rng = np.random.default_rng(9)
        for _ in range(20):
            psi = random_line_state(line, rng)
            assert abs(psi.norm() - 1.0) <= 1e-10
            peak = np.abs(psi.amplitudes).max()
            assert np.abs(psi.amplitudes[:2]).max() <= 1e-8 * peak
            assert np.abs(psi.amplitudes[-2:]).max() <= 1e-8 * peak

    def test_random_states_deterministic_per_seed(self, line):
        a = random_line_state(line, np.random.default_rng(33))
        b = random_line_state(line, np.random.default_rng(33))
        assert np.array_equal(a.amplitudes, b.amplitudes)


class TestGeodesicDistance:
    def test_matches_group_log_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            u = rng.normal(size=3)
            a = u / np.linalg.norm(u) * rng.uniform(0, np.pi - 0.1)
            u = rng.normal(size=3)
            b = u / np.linalg.norm(u) * rng.uniform(0, np.pi - 0.1)
            oracle = np.linalg.norm(log_map(exp_map(a) @ exp_map(b).T))
            assert abs(geodesic_distance(a[None], b)[0] - oracle) <= 1e-12

    def test_zero_at_same_rotation(self):
        v = np.array([0.4, -0.2, 0.9])
        assert geodesic_distance(v[None], v)[0] <= 1e-7

    def test_continuous_across_seam(self):
        # antipodal representatives are the same rotation
        axis = np.array([0.0, 1.0, 0.0])
        just_in = axis * (np.pi - 1e-4)
        wrapped = axis * -(np.pi - 1e-4)
        assert geodesic_distance(just_in[None], wrapped)[0] <= 1e-3


class TestSo3States:
    def test_normalized(self, ball):
        assert abs(so3_gaussian_state(ball, sigma=0.25).norm() - 1.0) <= 1e-12

    def test_envelope_depends_on_distance_only(self, ball):
        psi = so3_gaussian_state(ball, center=(0.2, 0.1, -0.3), sigma=0.3)
        d = geodesic_distance(ball.nodes, np.array([0.2, 0.1, -0.3]))
        order = np.argsort(d)
        mags = np.abs(psi.amplitudes)[order]
        assert np.all(np.diff(mags) <= 1e-12)

    def test_envelope_smooth_across_seam(self, ball):
        # evaluate the profile on both sides of the antipodal seam
        psi = so3_gaussian_state(ball, center=(0.3, 0.0, 0.0), sigma=0.5)
        axis = np.array([0.0, 0.0, 1.0])
        inside = psi.profile((axis * (np.pi - 1e-5))[None])[0]
        outside = psi.profile((-axis * (np.pi - 1e-5))[None])[0]
        assert abs(abs(inside) - abs(outside)) <= 1e-4 * abs(inside)

    def test_rejects_bad_sigma(self, ball):
        with pytest.raises(ValueError):
            so3_gaussian_state(ball, sigma=-0.1)

    def test_random_states_interior(self, ball):
        rng = np.random.default_rng(6)
        for _ in range(20):
            psi = random_so3_state(ball, rng)
            assert abs(psi.norm() - 1.0) <= 1e-10
            assert psi.boundary_mass() < 1e-8

    def test_random_states_deterministic_per_seed(self, ball):
        a = random_so3_state(ball, np.random.default_rng(5))
        b = random_so3_state(ball, np.random.default_rng(5))
        assert np.array_equal(a.amplitudes, b.amplitudes)
