import math
from dataclasses import replace

import numpy as np
import pytest

from gausshelp.capacity import ChannelParams
from gausshelp.codebook import HelperCodebook, build_base_codebook, derive_seed, haar_rotation
from gausshelp.scheme import (
    SchemeConfig,
    build_codebook,
    config_from_rates,
    decode,
    helper_select,
    run_trial,
    simulate,
    transmit,
)

CH = ChannelParams.from_snr(3.0)


def small_config(n=12, rate=0.9, rh=0.5, eps=0.1, seed=3, trials=200, **kw):
    return config_from_rates(n, rate, rh, CH, seed, eps=eps, trials=trials, **kw)


class TestConfig:
    def test_eps_must_sit_below_helper_rate(self):
        with pytest.raises(ValueError):
            SchemeConfig(blocklength=8, message_bits=4, helper_bits=4, eps=0.6,
                         channel=CH, codebook_seed=1, noise_seed=2, message_seed=3)

    def test_zero_helper_needs_zero_eps(self):
        with pytest.raises(ValueError):
            SchemeConfig(blocklength=8, message_bits=4, helper_bits=0, eps=0.1,
                         channel=CH, codebook_seed=1, noise_seed=2, message_seed=3)

    def test_unknown_decoder(self):
        with pytest.raises(ValueError):
            small_config(decoder="magic")

    def test_zero_helper_theta0_is_pi(self):
        cfg = config_from_rates(8, 1.0, 0.0, CH, seed=1, eps=None, trials=10)
        assert cfg.eps == 0.0
        assert cfg.theta0_rad == math.pi


def _square_codebook():
    # 4 codewords at 0/90/180/270 degrees on the unit circle (n=2, P=0.5)
    pts = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    return HelperCodebook(blocklength=2, power=0.5, help_size=4,
                          base_points=pts, rotation_seed_base=5)


class TestHelperSelect:
    def test_exact_alignment(self):
        cb = build_base_codebook(8, CH, 0.5, 0.1, seed=2)
        z = cb.base_points[3] * 0.37  # aligned with codeword 3 under identity rotation
        t, angle = helper_select(cb, 0, z, rotation=np.eye(8))
        assert t == 3
        assert angle == pytest.approx(0.0, abs=1e-7)

    def test_antipodal_single_codeword(self):
        pts = np.array([[1.0, 0.0]])
        cb = HelperCodebook(blocklength=2, power=0.5, help_size=1,
                            base_points=pts, rotation_seed_base=1)
        t, angle = helper_select(cb, 0, -pts[0], rotation=np.eye(2))
        assert t == 0
        assert angle == pytest.approx(math.pi, abs=1e-12)

    def test_square_codebook_oracle(self):
        cb = _square_codebook()
        ten_deg = math.radians(10.0)
        z = np.array([math.cos(ten_deg), math.sin(ten_deg)])
        # brute-force comparison over the 4 candidates
        angles = [math.acos(np.clip(p @ z, -1, 1)) for p in cb.base_points]
        assert int(np.argmin(angles)) == 0
        t, angle = helper_select(cb, 0, z, rotation=np.eye(2))
        assert t == 0
        assert angle == pytest.approx(ten_deg, abs=1e-12)

    def test_zero_noise_convention(self):
        cb = _square_codebook()
        assert helper_select(cb, 0, np.zeros(2)) == (0, 0.0)

    def test_dimension_checked(self):
        cb = _square_codebook()
        with pytest.raises(ValueError):
            helper_select(cb, 0, np.zeros(3))


class TestTransmit:
    def test_power_constraint(self):
        cb = build_base_codebook(8, CH, 0.5, 0.1, seed=2)
        for m, t in ((0, 0), (5, 3), (123, 7)):
            x = transmit(cb, m, t)
            assert float(x @ x) == pytest.approx(8 * CH.power, rel=1e-10)

    def test_identity_hook(self):
        cb = build_base_codebook(8, CH, 0.5, 0.1, seed=2)
        assert np.allclose(transmit(cb, 0, 0, rotation=np.eye(8)), cb.base_points[0])

    def test_repeatable(self):
        cb = build_base_codebook(8, CH, 0.5, 0.1, seed=2)
        assert np.array_equal(transmit(cb, 9, 2), transmit(cb, 9, 2))

    def test_index_range(self):
        cb = build_base_codebook(8, CH, 0.5, 0.1, seed=2)
        with pytest.raises(ValueError):
            transmit(cb, 0, cb.help_size)


class TestDecode:
    def test_exact_codeword(self):
        cb = build_base_codebook(8, CH, 0.5, 0.1, seed=2)
        y = transmit(cb, 17, 2)
        assert decode(cb, y, 2, range(64)) == 17

    def test_small_perturbation(self):
        cb = build_base_codebook(8, CH, 0.5, 0.1, seed=2)
        y = transmit(cb, 17, 2)
        y = y + 1e-6 * math.sqrt(8 * CH.power) * np.ones(8) / math.sqrt(8)
        assert decode(cb, y, 2, range(64)) == 17

    def test_empty_space(self):
        cb = build_base_codebook(8, CH, 0.5, 0.1, seed=2)
        with pytest.raises(ValueError):
            decode(cb, np.ones(8), 0, range(0))

    def test_brute_force_distance_oracle(self):
        # independent exhaustive distance scan, message_bits=10, n=16
        cb = build_base_codebook(16, CH, 0.5, 0.1, seed=6)
        rng = np.random.default_rng(40)
        for _ in range(5):
            y = rng.standard_normal(16) * 3.0
            t = int(rng.integers(cb.help_size))
            got = decode(cb, y, t, range(1024))
            dists = []
            for m in range(1024):
                rot = haar_rotation(16, derive_seed(cb.rotation_seed_base, m))
                cand = rot @ cb.base_points[t]
                dists.append(float(np.sum((y - cand) ** 2)))
            assert got == int(np.argmin(dists))

    def test_min_distance_equals_max_inner_product(self):
        cb = build_base_codebook(12, CH, 0.5, 0.1, seed=7)
        rng = np.random.default_rng(41)
        for _ in range(20):
            y = rng.standard_normal(12) * 2.0
            t = int(rng.integers(cb.help_size))
            scores, dists = [], []
            for m in range(256):
                cand = cb.rotation(m) @ cb.base_points[t]
                scores.append(float(cand @ y))
                dists.append(float(np.sum((y - cand) ** 2)))
            assert int(np.argmax(scores)) == int(np.argmin(dists))


class TestRunTrial:
    def test_deterministic(self):
        cfg = small_config()
        cb = build_codebook(cfg)
        a = run_trial(cfg, cb, 5, trial_seed=999)
        b = run_trial(cfg, cb, 5, trial_seed=999)
        assert a == b

    def test_record_consistency(self):
        cfg = small_config()
        cb = build_codebook(cfg)
        rec = run_trial(cfg, cb, 5, trial_seed=1000)
        assert rec.error == (rec.decoded != rec.message)
        assert rec.covering_miss == (rec.helper_angle > cfg.theta0_rad)

    def test_norm_identity(self):
        cfg = small_config()
        cb = build_codebook(cfg)
        for seed in range(20):
            rec, x, z = run_trial(cfg, cb, seed, trial_seed=seed, return_vectors=True)
            y = x + z
            lhs = float(y @ y)
            rhs = float(x @ x) + float(z @ z) + \
                2.0 * np.linalg.norm(x) * np.linalg.norm(z) * math.cos(rec.helper_angle)
            assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_noise_energy_concentrates(self):
        # chi-square upper tail stays below the Chernoff bound
        n, trials, delta = 64, 600, 0.5
        cfg = config_from_rates(n, 1.0 / 16.0, 0.125, CH, seed=12, eps=0.05, trials=trials)
        cb = build_codebook(cfg)
        exceed = 0
        for i in range(trials):
            rec = run_trial(cfg, cb, i % 4, trial_seed=derive_seed(cfg.noise_seed, i))
            if rec.noise_energy > n * CH.noise_var * (1.0 + delta):
                exceed += 1
        chernoff = math.exp(-n / 2.0 * (delta - math.log1p(delta)))
        assert exceed / trials < chernoff


class TestSimulate:
    def test_single_trial_matches_record(self):
        cfg = small_config(trials=1)
        s = simulate(cfg, keep_records=True)
        (rec,) = s.records
        assert s.errors == int(rec.error)
        assert s.covering_misses == int(rec.covering_miss)
        assert s.mean_helper_angle == rec.helper_angle
        assert s.mean_decode_angle == rec.decode_angle

    def test_deterministic(self):
        cfg = small_config(trials=50)
        a, b = simulate(cfg), simulate(cfg)
        for field in ("errors", "covering_misses", "err_rate", "ci_low", "ci_high",
                      "mean_helper_angle", "mean_decode_angle"):
            assert getattr(a, field) == getattr(b, field)

    def test_exact_integer_accounting(self):
        cfg = small_config(trials=120)
        s = simulate(cfg, keep_records=True)
        assert s.errors == sum(r.error for r in s.records)
        assert s.covering_misses == sum(r.covering_miss for r in s.records)
        assert s.ci_low <= s.err_rate <= s.ci_high

    def test_analytic_route_agrees_with_exhaustive(self):
        # the two decode routes must produce statistically identical error rates
        cfg = small_config(n=12, rate=0.9, trials=3000)
        se = simulate(replace(cfg, decoder="exhaustive"))
        sa = simulate(replace(cfg, decoder="analytic"))
        assert se.ci_low <= sa.ci_high and sa.ci_low <= se.ci_high

    def test_easy_regime_is_error_free(self):
        # one message bit, generous helper, high SNR
        ch = ChannelParams.from_snr(20.0)
        cfg = config_from_rates(16, 1.0 / 16.0, 0.75, ch, seed=15, eps=0.1, trials=500)
        assert cfg.message_bits == 1
        s = simulate(cfg)
        assert s.ci_high < 0.01

    def test_message_override(self):
        cfg = small_config(trials=10)
        s = simulate(cfg, keep_records=True, messages=[3] * 10)
        assert all(r.message == 3 for r in s.records)
        with pytest.raises(ValueError):
            simulate(cfg, messages=[1, 2])

    def test_helper_alignment_tightens_with_blocklength(self):
        means = []
        for n in (12, 16, 24, 32):
            cfg = config_from_rates(n, 1.0, 0.5, CH, seed=4, eps=0.1, trials=400)
            s = simulate(cfg, keep_records=True)
            means.append(np.mean([math.cos(r.helper_angle) for r in s.records]))
            covered = [math.cos(r.helper_angle) for r in s.records if not r.covering_miss]
            assert min(covered) >= math.cos(cfg.theta0_rad) - 1e-12
        assert all(b > a for a, b in zip(means, means[1:]))
