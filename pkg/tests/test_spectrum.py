"""Traffic generation, capture, visualization, and dataset contracts."""

import math

import numpy as np
import pytest

from ricsim.errors import ModeMismatchError, SignalDomainError
from ricsim.spectrum import (
    Dataset,
    SpectrumClass,
    gen_class_signal,
    capture_iq,
    load_dataset,
    make_dataset,
    nearest_centroid_accuracy,
    save_dataset,
    generate_captures,
    visualize,
)
from ricsim.signals import ComplexSignal
from ricsim.surface import configure_ra, configure_rr


class TestSpectrumClass:
    def test_bijection_with_activity_bits(self):
        seen = set()
        for cls in SpectrumClass:
            bits = cls.active_users
            assert SpectrumClass.from_active_users(bits) is cls
            seen.add(bits)
        assert len(seen) == 8

    def test_index_order_matches_activity(self):
        assert SpectrumClass.IDLE == 0
        assert SpectrumClass.U1.active_users == (True, False, False)
        assert SpectrumClass.U1U2U3.active_users == (True, True, True)


class TestGenClassSignal:
    def test_idle_is_noise_only(self):
        noise_w = 4e-14
        sig, lab = gen_class_signal(SpectrumClass.IDLE, 0.2, 4096, seed=3, noise_power_w=noise_w)
        assert lab is SpectrumClass.IDLE
        assert sig.power() == pytest.approx(noise_w, rel=0.05)

    def test_u2_peak_near_zero(self):
        sig, _ = gen_class_signal(SpectrumClass.U2, 0.2, 4096, seed=5)
        freqs = np.fft.fftfreq(len(sig), 1 / sig.sample_rate)
        peak = freqs[np.argmax(np.abs(np.fft.fft(sig.samples)))]
        assert abs(peak) < 0.5e6

    @pytest.mark.parametrize("cls,offset", [(SpectrumClass.U1, -3e6), (SpectrumClass.U3, 3e6)])
    def test_side_users_occupy_their_subband(self, cls, offset):
        sig, _ = gen_class_signal(cls, 0.2, 4096, seed=5)
        freqs = np.fft.fftfreq(len(sig), 1 / sig.sample_rate)
        peak = freqs[np.argmax(np.abs(np.fft.fft(sig.samples)))]
        assert abs(peak - offset) < 1.5e6

    def test_superposition_by_construction(self):
        seed = 77
        total, _ = gen_class_signal(SpectrumClass.U1U2U3, 0.2, 1024, seed)
        parts = [
            gen_class_signal(c, 0.2, 1024, seed)[0].samples
            for c in (SpectrumClass.U1, SpectrumClass.U2, SpectrumClass.U3)
        ]
        assert np.allclose(total.samples, parts[0] + parts[1] + parts[2], atol=1e-15)

    def test_label_echo_and_power_scale(self):
        sig, lab = gen_class_signal(SpectrumClass.U1, 0.5, 2048, seed=1)
        assert lab is SpectrumClass.U1
        assert sig.power() == pytest.approx(0.5, rel=1e-6)  # unit-modulus QPSK

    def test_too_short_rejected(self):
        with pytest.raises(SignalDomainError):
            gen_class_signal(SpectrumClass.U1, 0.2, 128, seed=0)


class TestCaptureIq:
    def test_combining_gain(self, scenario):
        """1 -> 4 absorbers lifts the noiseless capture power by 10*log10(4) dB."""
        sig, _ = gen_class_signal(SpectrumClass.U1, 0.2, 1024, seed=9)
        quiet = scenario.with_rf(noise_density_dbm_hz=-400.0)  # push noise to nothing
        p1 = capture_iq(sig, configure_ra(60, 1), quiet, seed=1).power()
        p4 = capture_iq(sig, configure_ra(60, 4), quiet, seed=1).power()
        assert 10 * math.log10(p4 / p1) == pytest.approx(10 * math.log10(4), abs=1e-9)

    def test_zero_input_gives_noise_floor(self, scenario):
        sig = ComplexSignal(np.zeros(4096) + 0j, scenario.rf.bandwidth_hz)
        cap = capture_iq(sig, configure_ra(60, 4), scenario, seed=2)
        assert cap.power() == pytest.approx(scenario.noise_w(), rel=0.1)

    def test_requires_ra_mode(self, scenario):
        sig, _ = gen_class_signal(SpectrumClass.U1, 0.2, 1024, seed=9)
        with pytest.raises(ModeMismatchError):
            capture_iq(sig, configure_rr(60, 0.5), scenario, seed=1)

    def test_snr_matches_link_budget_oracle(self, scenario):
        """Mean capture SNR over many trials tracks n_absorb*g*P/N0 within 0.5 dB."""
        profile = configure_ra(60, 4)
        n_trials, n = 1000, 1024
        noise_w = scenario.noise_w()
        oracle_snr_db = (
            10 * math.log10(scenario.rf.tx_power_w)
            + 10 * math.log10(scenario.gain_user_rics())
            + 10 * math.log10(profile.n_absorb)
            - 10 * math.log10(noise_w)
        )
        powers = []
        for trial in range(n_trials):
            sig, _ = gen_class_signal(SpectrumClass.U1, scenario.rf.tx_power_w, n, seed=trial)
            cap = capture_iq(sig, profile, scenario, seed=trial)
            powers.append(cap.power())
        mean_snr = (np.mean(powers) - noise_w) / noise_w
        assert 10 * math.log10(mean_snr) == pytest.approx(oracle_snr_db, abs=0.5)


class TestVisualize:
    def test_all_zero_input(self, scenario):
        img = visualize(ComplexSignal(np.zeros(512) + 0j, 10e6))
        assert np.all(img.grid == 0.0)

    def test_normalization(self):
        sig, _ = gen_class_signal(SpectrumClass.U1U2, 0.2, 1024, seed=3)
        img = visualize(sig)
        assert img.grid.max() == pytest.approx(1.0)
        assert img.grid.min() >= 0.0

    def test_idle_is_flat(self, scenario):
        """No bin dominates a noise-only capture (95% of trials, 4096-sample traces)."""
        profile = configure_ra(60, 4)
        flat = 0
        trials = 200
        for t in range(trials):
            sig, _ = gen_class_signal(
                SpectrumClass.IDLE, 0.2, 4096, seed=t, noise_power_w=scenario.noise_w()
            )
            cap = capture_iq(sig, profile, scenario, seed=t)
            g = visualize(cap).grid
            if g.max() <= 3.0 * np.median(g):
                flat += 1
        assert flat / trials >= 0.95

    def test_u2_energy_in_center_columns(self, scenario):
        """The -1.5..1.5 MHz column block holds the busiest bins for user 2."""
        profile = configure_ra(60, 4)
        hits = 0
        for t in range(50):
            sig, _ = gen_class_signal(
                SpectrumClass.U2, 0.2, 1024, seed=t, noise_power_w=scenario.noise_w()
            )
            img = visualize(capture_iq(sig, profile, scenario, seed=t))
            col_energy = img.grid.sum(axis=0)
            # 16 columns span -5..5 MHz; -1.5..1.5 MHz covers columns 6..10
            hits += int(6 <= np.argmax(col_energy) <= 10)
        assert hits >= 48

    def test_too_short(self):
        with pytest.raises(SignalDomainError):
            visualize(ComplexSignal(np.ones(100) + 0j, 10e6))


class TestDataset:
    def test_balance_and_size(self, scenario):
        ds = make_dataset(5, configure_ra(60, 4), scenario, seed=11, n_samples=512)
        assert len(ds) == 40
        counts = np.bincount(ds.labels, minlength=8)
        assert np.all(counts == 5)

    def test_seed_determinism(self, scenario):
        p = configure_ra(60, 4)
        a = make_dataset(3, p, scenario, seed=42, n_samples=512)
        b = make_dataset(3, p, scenario, seed=42, n_samples=512)
        assert np.array_equal(a.images, b.images)
        assert np.array_equal(a.labels, b.labels)
        c = make_dataset(3, p, scenario, seed=43, n_samples=512)
        assert not np.array_equal(a.images, c.images)

    def test_worker_count_invariance(self, scenario):
        p = configure_ra(60, 4)
        a = make_dataset(3, p, scenario, seed=42, n_samples=512, workers=1)
        b = make_dataset(3, p, scenario, seed=42, n_samples=512, workers=8)
        assert np.array_equal(a.images, b.images)

    def test_power_raises_snr(self, scenario):
        """Raising per-user transmit power strictly raises mean capture SNR."""
        p = configure_ra(60, 4)
        powers = []
        for tx in (0.05, 0.2, 0.8):
            sc = scenario.with_rf(tx_power_w=tx)
            caps, _, _ = generate_captures(2, p, sc, seed=5, n_samples=512)
            powers.append(np.mean([c.power() for c in caps]))
        assert powers[0] < powers[1] < powers[2]

    def test_save_load_round_trip(self, scenario, tmp_path):
        p = configure_ra(60, 4)
        caps, labels, images = generate_captures(2, p, scenario, seed=6, n_samples=512)
        save_dataset(tmp_path / "ds", caps, [int(l) for l in labels], images)
        back = load_dataset(tmp_path / "ds")
        assert np.array_equal(back.labels, labels)
        assert np.array_equal(back.images, images)
        # remove the image cache: images must be reconstructible from signals
        (tmp_path / "ds" / "images.bin").unlink()
        rebuilt = load_dataset(tmp_path / "ds")
        assert np.allclose(rebuilt.images, images, atol=1e-12)

    def test_nearest_centroid_separability(self, small_datasets):
        """Independent pre-classifier oracle: the synthetic task is learnable."""
        train, test = small_datasets
        assert nearest_centroid_accuracy(train, test) >= 0.60
