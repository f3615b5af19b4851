"""TDMA allocation rules, the Shannon delivery oracle, and sweep properties."""

import math

import numpy as np
import pytest

from ricsim.errors import SimulationError
from ricsim.spectrum import SpectrumClass
from ricsim.surface import configure_ra
from ricsim.throughput import (
    SCHEME_2LAYER,
    SCHEME_4LAYER,
    SCHEME_ORDER,
    SCHEME_PERFECT,
    SCHEME_STATIC,
    FrameOutcome,
    allocate_slots,
    allocate_static,
    frame_throughput,
    run_throughput_experiment,
    simulate_frame,
)


def near_perfect_confusion(p=0.9):
    conf = np.full((8, 8), (1 - p) / 7)
    np.fill_diagonal(conf, p)
    return conf


class TestAllocation:
    def test_idle_gets_nothing(self):
        assert allocate_slots(SpectrumClass.IDLE, 12) == (0, 0, 0)

    def test_equal_split(self):
        assert allocate_slots(SpectrumClass.U1U2U3, 12) == (4, 4, 4)

    def test_inactive_excluded(self):
        assert allocate_slots(SpectrumClass.U1U3, 12) == (6, 0, 6)

    def test_remainder_to_lowest_active(self):
        assert allocate_slots(SpectrumClass.U2U3, 7) == (0, 4, 3)
        assert allocate_slots(SpectrumClass.U1U2U3, 10) == (4, 3, 3)

    def test_static_equal_thirds(self):
        assert allocate_static(12) == (4, 4, 4)
        assert allocate_static(10) == (4, 3, 3)

    def test_static_is_blind(self):
        # same answer regardless of what is on the air, by signature alone
        assert allocate_static(9) == (3, 3, 3)


class TestFrameThroughput:
    @pytest.fixture()
    def scenario(self, default_cfg):
        from ricsim.config import build_scenario

        return build_scenario(default_cfg)

    def test_idle_truth_delivers_nothing(self, scenario):
        p = configure_ra(60, 4)
        assert frame_throughput(SpectrumClass.IDLE, (4, 4, 4), scenario, p, 1e-3, 1000) == 0.0

    def test_missed_user_delivers_nothing(self, scenario):
        p = configure_ra(60, 4)
        assert frame_throughput(SpectrumClass.U1, (0, 12, 0), scenario, p, 1e-3, 1000) == 0.0

    def test_matches_shannon_oracle(self, scenario):
        """Closed-form link budget + capacity, computed independently."""
        n, n_absorb = 60, 4
        profile = configure_ra(n, n_absorb)
        slot, payload = 1.2e-6, 1000.0
        delivered = frame_throughput(SpectrumClass.U1, (12, 0, 0), scenario, profile, slot, payload)
        m = n - n_absorb
        snr = (
            scenario.rf.tx_power_w
            * m**2
            * scenario.gain_user_rics(0)
            * scenario.gain_rics_bs()
            / scenario.noise_w()
        )
        oracle = min(payload, 12 * slot * scenario.rf.bandwidth_hz * math.log2(1 + snr))
        assert delivered == pytest.approx(oracle, rel=1e-9)

    def test_payload_caps_delivery(self, scenario):
        p = configure_ra(100, 4)
        huge_slots = (1000, 0, 0)
        delivered = frame_throughput(SpectrumClass.U1, huge_slots, scenario, p, 1e-3, 1000)
        assert delivered == 1000.0

    def test_monotone_in_elements_and_power(self, scenario):
        slot, payload = 1.2e-6, 1e12  # uncapped to expose the trend
        prev = 0.0
        for n in (20, 40, 60, 80, 100):
            d = frame_throughput(
                SpectrumClass.U1, (12, 0, 0), scenario, configure_ra(n, 4), slot, payload
            )
            assert d >= prev
            prev = d
        lo = frame_throughput(
            SpectrumClass.U1, (12, 0, 0), scenario.with_rf(tx_power_w=0.1), configure_ra(60, 4), slot, payload
        )
        hi = frame_throughput(
            SpectrumClass.U1, (12, 0, 0), scenario.with_rf(tx_power_w=0.4), configure_ra(60, 4), slot, payload
        )
        assert hi > lo

    def test_bad_allocation(self, scenario):
        with pytest.raises(ValueError):
            frame_throughput(SpectrumClass.U1, (1, -1, 0), scenario, configure_ra(8, 4), 1e-3, 1000)


class TestFrameOutcome:
    @pytest.fixture()
    def scenario(self, default_cfg):
        from ricsim.config import build_scenario

        return build_scenario(default_cfg)

    def test_per_user_accounting(self, scenario):
        out = simulate_frame(
            SpectrumClass.U1U3, SpectrumClass.U1U3, scenario, configure_ra(60, 4), 12, 1.2e-6, 1000
        )
        assert out.allocation == (6, 0, 6)
        assert out.delivered_bits[1] == 0.0
        assert out.delivered_bits[0] > 0 and out.delivered_bits[2] > 0
        assert all(b <= 1000 for b in out.delivered_bits)
        assert out.total_bits == pytest.approx(
            frame_throughput(
                SpectrumClass.U1U3, (6, 0, 6), scenario, configure_ra(60, 4), 1.2e-6, 1000
            ),
            rel=1e-12,
        )

    def test_missed_user_gets_nothing(self, scenario):
        out = simulate_frame(
            SpectrumClass.U1, SpectrumClass.U2, scenario, configure_ra(60, 4), 12, 1.2e-6, 1000
        )
        assert out.allocation == (0, 12, 0)
        assert out.total_bits == 0.0

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            FrameOutcome(SpectrumClass.U1, SpectrumClass.U2, (12, 0, 0), (0.0, 0.0, 0.0))
        with pytest.raises(ValueError):
            FrameOutcome(SpectrumClass.U1, SpectrumClass.U1U2, (6, 6, 0), (0.0, 10.0, 0.0))


class TestExperiment:
    @pytest.fixture()
    def scenario(self, default_cfg):
        from ricsim.config import build_scenario

        return build_scenario(default_cfg)

    @pytest.fixture()
    def confusions(self):
        return {SCHEME_2LAYER: near_perfect_confusion(0.85), SCHEME_4LAYER: near_perfect_confusion(0.95)}

    def run(self, scenario, confusions, workers=1, frames=400, seed=123):
        return run_throughput_experiment(
            scenario,
            [20, 60, 100],
            frames=frames,
            frame_slots=12,
            slot_duration_s=1.2e-6,
            payload_bits=1000,
            n_absorb=4,
            seed=seed,
            confusions=confusions,
            workers=workers,
        )

    def test_scheme_ordering(self, scenario, confusions):
        rows = self.run(scenario, confusions)
        by = {(r.scheme, r.n_elements): r.mean_throughput_bps for r in rows}
        for n in (20, 60, 100):
            assert (
                by[(SCHEME_PERFECT, n)]
                >= by[(SCHEME_4LAYER, n)]
                >= by[(SCHEME_2LAYER, n)]
                >= by[(SCHEME_STATIC, n)]
            )

    def test_perfect_accuracy_dominates_static(self, scenario):
        conf = {SCHEME_2LAYER: np.eye(8), SCHEME_4LAYER: np.eye(8)}
        rows = self.run(scenario, conf)
        by = {(r.scheme, r.n_elements): (r.mean_throughput_bps, r.ci95_bps) for r in rows}
        for n in (20, 60, 100):
            mean_p, ci_p = by[(SCHEME_PERFECT, n)]
            mean_s, ci_s = by[(SCHEME_STATIC, n)]
            assert mean_p - ci_p > mean_s + ci_s

    def test_monotone_in_elements(self, scenario, confusions):
        rows = self.run(scenario, confusions)
        for scheme in SCHEME_ORDER:
            series = [r.mean_throughput_bps for r in rows if r.scheme == scheme]
            assert all(b >= a for a, b in zip(series, series[1:]))

    def test_seed_and_worker_determinism(self, scenario, confusions):
        a = self.run(scenario, confusions, workers=1)
        b = self.run(scenario, confusions, workers=8)
        assert a == b
        c = self.run(scenario, confusions, seed=124)
        assert c != a

    def test_requires_exactly_one_inference_source(self, scenario, confusions):
        with pytest.raises(SimulationError):
            run_throughput_experiment(
                scenario, [20], 10, 12, 1.2e-6, 1000, 4, 1, confusions=None, models=None
            )

    def test_missing_scheme_rejected(self, scenario):
        with pytest.raises(SimulationError):
            run_throughput_experiment(
                scenario, [20], 10, 12, 1.2e-6, 1000, 4, 1,
                confusions={SCHEME_2LAYER: np.eye(8)},
            )

    def test_row_order_is_canonical(self, scenario, confusions):
        rows = self.run(scenario, confusions)
        expected = [(s, n) for s in SCHEME_ORDER for n in (20, 60, 100)]
        assert [(r.scheme, r.n_elements) for r in rows] == expected


class TestFading:
    def test_fading_mode_deterministic_and_ordered(self, default_cfg, scenario):
        faded = scenario.with_rf(fading=True)
        conf = {SCHEME_2LAYER: near_perfect_confusion(0.85), SCHEME_4LAYER: near_perfect_confusion(0.95)}
        kwargs = dict(
            n_grid=[20, 100], frames=600, frame_slots=12, slot_duration_s=1.2e-6,
            payload_bits=1000, n_absorb=4, seed=9, confusions=conf,
        )
        a = run_throughput_experiment(faded, **kwargs)
        b = run_throughput_experiment(faded, **kwargs)
        assert a == b
        by = {(r.scheme, r.n_elements): r.mean_throughput_bps for r in a}
        for n in (20, 100):
            assert by[(SCHEME_PERFECT, n)] >= by[(SCHEME_2LAYER, n)] >= by[(SCHEME_STATIC, n)]


class TestModelModeAgreesWithEmulation:
    def test_within_two_percent(self, scenario, trained_checkpoints):
        """Running the real classifier per frame tracks confusion-matrix sampling."""
        from ricsim.onn import load_confusion, load_model

        models_dir, _ = trained_checkpoints
        models, confusions = {}, {}
        for layers, scheme in ((2, SCHEME_2LAYER), (4, SCHEME_4LAYER)):
            path = models_dir / f"onn-{layers}layer.ckpt"
            models[scheme] = load_model(path)
            confusions[scheme] = load_confusion(path)[1]
        kwargs = dict(
            n_grid=[60], frames=4000, frame_slots=12, slot_duration_s=1.2e-6,
            payload_bits=1000, n_absorb=4, seed=77,
        )
        emulated = run_throughput_experiment(scenario, confusions=confusions, **kwargs)
        modeled = run_throughput_experiment(scenario, models=models, n_samples=1024, **kwargs)
        em = {r.scheme: r.mean_throughput_bps for r in emulated}
        mo = {r.scheme: r.mean_throughput_bps for r in modeled}
        for scheme in (SCHEME_2LAYER, SCHEME_4LAYER):
            assert abs(em[scheme] - mo[scheme]) / em[scheme] < 0.02
