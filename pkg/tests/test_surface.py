"""Surface profile rules and the cascaded array-gain law."""

import math

import numpy as np
import pytest

from ricsim.errors import InvalidProfileError, ModeMismatchError
from ricsim.surface import SurfaceMode, coherent_array_gain, configure_ra, configure_rr, split_power


class TestConfigureRa:
    def test_basic_construction(self):
        p = configure_ra(100, 4)
        assert p.mode is SurfaceMode.RA
        assert p.n_reflect == 96
        assert p.alpha == 1.0 and p.beta == 0.0
        assert p.reflect_phases.shape == (96,)

    def test_no_reflectors_left(self):
        with pytest.raises(InvalidProfileError):
            configure_ra(100, 100)

    def test_needs_sensing_elements(self):
        with pytest.raises(InvalidProfileError):
            configure_ra(100, 0)

    def test_combining_gain_oracle(self):
        # four coherently combined receivers beat one by 10*log10(4) dB
        assert 10 * math.log10(4) == pytest.approx(6.02, abs=5e-3)

    def test_phases_are_frozen(self):
        p = configure_ra(10, 2)
        with pytest.raises(ValueError):
            p.reflect_phases[0] = 1.0


class TestConfigureRr:
    @pytest.mark.parametrize("alpha,beta", [(0.5, 0.5), (1.0, 0.0), (0.2, 0.8)])
    def test_split(self, alpha, beta):
        p = configure_rr(60, alpha)
        assert p.beta == pytest.approx(beta)
        assert split_power(p) == (alpha, pytest.approx(beta))

    def test_alpha_out_of_range(self):
        with pytest.raises(InvalidProfileError):
            configure_rr(60, 1.5)
        with pytest.raises(InvalidProfileError):
            configure_rr(60, -0.1)

    def test_ra_split_is_pure_reflection(self):
        assert split_power(configure_ra(60, 4)) == (1.0, 0.0)

    def test_alpha_beta_sum_to_one(self):
        rng = np.random.default_rng(2)
        for a in rng.random(50):
            alpha, beta = split_power(configure_rr(16, float(a)))
            assert alpha + beta == pytest.approx(1.0, abs=1e-15)


class TestArrayGain:
    def test_single_element(self):
        p = configure_rr(1, 0.3)
        g = coherent_array_gain(p, "reflect", 0.5, 0.25)
        assert g == pytest.approx(0.3 * 0.5 * 0.25, rel=1e-12)

    def test_quadratic_array_law(self):
        g1 = coherent_array_gain(configure_rr(16, 1.0), "reflect", 1e-3, 1e-4)
        g2 = coherent_array_gain(configure_rr(32, 1.0), "reflect", 1e-3, 1e-4)
        assert g2 / g1 == pytest.approx(4.0, rel=1e-12)

    def test_random_phase_expectation(self):
        """Monte-Carlo oracle: E|sum_m exp(j phi)|^2 = M for uniform phases."""
        rng = np.random.default_rng(99)
        m, draws = 64, 200_000
        phases = rng.uniform(0, 2 * np.pi, size=(draws, m))
        power = np.abs(np.exp(1j * phases).sum(axis=1)) ** 2
        assert power.mean() == pytest.approx(m, rel=0.02)
        # and through the profile API on a subsample
        gains = [
            coherent_array_gain(configure_rr(m, 1.0, reflect_phases=phases[i]), "reflect", 1.0, 1.0)
            for i in range(2000)
        ]
        assert np.mean(gains) == pytest.approx(m, rel=0.2)

    def test_aligned_is_supremum(self):
        rng = np.random.default_rng(41)
        p_aligned = configure_rr(24, 0.7)
        best = coherent_array_gain(p_aligned, "reflect", 0.9, 0.8)
        for _ in range(300):
            p = configure_rr(24, 0.7, reflect_phases=rng.uniform(0, 2 * np.pi, 24))
            assert coherent_array_gain(p, "reflect", 0.9, 0.8) <= best + 1e-12

    def test_monotone_in_elements(self):
        gains = [coherent_array_gain(configure_rr(m, 1.0), "reflect", 0.1, 0.1) for m in range(1, 40)]
        assert all(b > a for a, b in zip(gains, gains[1:]))

    def test_energy_split_sums(self):
        p = configure_rr(20, 0.35)
        total = coherent_array_gain(p, "reflect", 0.5, 0.5) + coherent_array_gain(p, "refract", 0.5, 0.5)
        assert total == pytest.approx(1.0 * 20**2 * 0.5 * 0.5, rel=1e-12)

    def test_refract_side_of_ra_profile(self):
        with pytest.raises(ModeMismatchError):
            coherent_array_gain(configure_ra(10, 2), "refract", 0.5, 0.5)

    def test_bad_hop_gain(self):
        with pytest.raises(ValueError):
            coherent_array_gain(configure_rr(4, 0.5), "reflect", 0.0, 0.5)
        with pytest.raises(ValueError):
            coherent_array_gain(configure_rr(4, 0.5), "reflect", 0.5, 1.5)

    def test_element_efficiency_scales_power(self):
        from dataclasses import replace

        lossless = configure_rr(10, 1.0)
        lossy = replace(lossless, element_efficiency=0.5)
        g0 = coherent_array_gain(lossless, "reflect", 0.5, 0.5)
        g1 = coherent_array_gain(lossy, "reflect", 0.5, 0.5)
        assert g1 == pytest.approx(0.25 * g0, rel=1e-12)
