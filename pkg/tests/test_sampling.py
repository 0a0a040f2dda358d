import json
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from turbinekit.config import GeneratorConfig
from turbinekit.sampling import (
    STAGE_BACKGROUND,
    STAGE_NOISE,
    STAGE_SCENE,
    MIN_VALUE_FACTOR,
    SceneConfig,
    _sample_value_factor,
    derive_rng,
    sample_scene,
)

DATA = Path(__file__).parent / "data"


class TestRngDerivation:
    def test_same_pair_same_stream(self):
        a = derive_rng(7, 3).random(8)
        b = derive_rng(7, 3).random(8)
        np.testing.assert_array_equal(a, b)

    def test_different_index_different_stream(self):
        a = derive_rng(7, 0).random(8)
        b = derive_rng(7, 1).random(8)
        assert not np.array_equal(a, b)

    def test_different_stage_different_stream(self):
        a = derive_rng(7, 0, STAGE_SCENE).random(8)
        b = derive_rng(7, 0, STAGE_BACKGROUND).random(8)
        c = derive_rng(7, 0, STAGE_NOISE).random(8)
        assert not np.array_equal(a, b) and not np.array_equal(b, c)


class TestSceneDeterminism:
    def test_same_inputs_identical_scene(self, default_config):
        a = sample_scene(11, 4, default_config)
        b = sample_scene(11, 4, default_config)
        assert a.to_dict() == b.to_dict()

    def test_adjacent_indices_differ(self, default_config):
        a = sample_scene(11, 0, default_config)
        b = sample_scene(11, 1, default_config)
        assert a.to_dict() != b.to_dict()

    def test_golden_scene_frozen(self, default_config):
        # regression fixture: frozen from the first release of the sampler
        scene = sample_scene(42, 0, default_config)
        text = json.dumps(scene.to_dict(), indent=2, sort_keys=True) + "\n"
        assert text == (DATA / "golden_scene_seed42_idx0.json").read_text()

    def test_serialization_roundtrip(self, default_config):
        scene = sample_scene(5, 9, default_config)
        back = SceneConfig.from_dict(json.loads(json.dumps(scene.to_dict())))
        assert back.to_dict() == scene.to_dict()


class TestDistributionSupports:
    def test_all_draws_inside_supports(self, default_config):
        t = default_config.turbines
        c = default_config.camera
        a = default_config.augment
        for i in range(400):
            s = sample_scene(123, i, default_config)
            assert 1 <= len(s.turbines) <= 4
            for wt in s.turbines:
                x, y = wt.position
                assert abs(x) >= t.x_min_m and abs(x) <= y
                assert t.x_min_m <= y <= t.y_far_max_m
                assert 0.0 <= wt.yaw_deg < 360.0
                assert 0.0 <= wt.blade_rotation_deg < 360.0
            assert c.distance_min_m <= s.camera.distance_m <= c.distance_far_max_m
            assert c.height_range_m[0] <= s.camera.height_m <= c.height_range_m[1]
            assert (
                c.focal_length_range_mm[0]
                <= s.camera.focal_length_mm
                <= c.focal_length_range_mm[1]
            )
            if s.augment.jpeg_quality is not None:
                assert a.jpeg_quality_range[0] <= s.augment.jpeg_quality <= a.jpeg_quality_range[1]
            if s.augment.noise_sigma is not None:
                assert a.noise_sigma_range[0] <= s.augment.noise_sigma <= a.noise_sigma_range[1]
                assert s.augment.noise_mean == 0.0
            assert s.augment.hsv_fg.value_factor > MIN_VALUE_FACTOR
            assert s.augment.hsv_bg.value_factor > MIN_VALUE_FACTOR
            assert s.augment.is_noise_background == (s.background.kind == "noise")

    def test_near_far_regime_correlates_y_and_distance(self, default_config):
        # one shared coin: distance beyond the near cap proves the far regime,
        # where y > 200 has probability 0.75; under independent coins it
        # would stay at the marginal 0.375
        far_d = {"y_far": 0, "n": 0}
        near_d = {"y_far": 0, "n": 0}
        for i in range(600):
            s = sample_scene(321, i, default_config)
            y_exceeds = max(wt.position[1] for wt in s.turbines) > 200.0
            bucket = (
                far_d
                if s.camera.distance_m > default_config.camera.distance_near_max_m
                else near_d
            )
            bucket["n"] += 1
            bucket["y_far"] += y_exceeds
        assert far_d["n"] > 100 and near_d["n"] > 100
        assert far_d["y_far"] / far_d["n"] > 0.55
        assert near_d["y_far"] / near_d["n"] < 0.3

    def test_count_distribution_matches_multiset(self, default_config):
        counts = {1: 0, 2: 0, 3: 0, 4: 0}
        n = 2000
        for i in range(n):
            counts[len(sample_scene(99, i, default_config).turbines)] += 1
        # multiset {1 x6, 2 x3, 3 x2, 4 x1} out of 12
        expected = {1: 6 / 12, 2: 3 / 12, 3: 2 / 12, 4: 1 / 12}
        chi2, p = stats.chisquare(
            [counts[k] for k in (1, 2, 3, 4)], [expected[k] * n for k in (1, 2, 3, 4)]
        )
        assert p > 0.01

    def test_blade_rotation_uniform_ks(self, default_config):
        phis = []
        i = 0
        while len(phis) < 2000:
            s = sample_scene(55, i, default_config)
            phis.extend(wt.blade_rotation_deg for wt in s.turbines)
            i += 1
        res = stats.kstest(np.array(phis) / 360.0, "uniform")
        assert res.pvalue > 0.01

    def test_value_factor_mean_near_one(self):
        rng = derive_rng(1, 0)
        draws = np.array([_sample_value_factor(rng, 0.3) for _ in range(100_000)])
        assert abs(draws.mean() - 1.0) < 0.01
        assert (draws > MIN_VALUE_FACTOR).all()

    def test_yaw_scatter_clusters_around_image_heading(self, default_config):
        # all turbines in one image share a heading within a few sigma
        for i in range(200):
            s = sample_scene(777, i, default_config)
            if len(s.turbines) < 2:
                continue
            yaws = np.array([wt.yaw_deg for wt in s.turbines])
            ref = yaws[0]
            spread = np.abs((yaws - ref + 180.0) % 360.0 - 180.0)
            assert spread.max() < 40.0  # 8 sigma guard band


class TestConfigOverrides:
    def test_forced_noise_background(self):
        cfg = GeneratorConfig()
        cfg.augment.noise_background_fraction = 1.0
        for i in range(20):
            s = sample_scene(3, i, cfg)
            assert s.background.kind == "noise"
            assert s.augment.is_noise_background

    def test_center_on_hub_aims_first_turbine(self):
        cfg = GeneratorConfig()
        cfg.camera.center_on_hub = True
        s = sample_scene(8, 2, cfg)
        t0 = s.turbines[0]
        assert s.camera.aim_point == (
            t0.position[0],
            t0.position[1],
            t0.geometry.hub_height,
        )

    def test_scale_variants_respected(self):
        cfg = GeneratorConfig()
        cfg.turbines.scale_variants = [2.0]
        s = sample_scene(4, 0, cfg)
        assert s.turbines[0].geometry.hub_height == pytest.approx(178.0)

    def test_point_mass_sun_stored(self, default_config):
        s = sample_scene(1, 1, default_config)
        assert (s.sun.azimuth_deg, s.sun.altitude_deg, s.sun.dust_density) == (0.0, 90.0, 1.0)
