import math

import numpy as np
import pytest

from turbinekit.camera import (
    CameraConfig,
    PixelPoint,
    bbox_from_projection,
    camera_pose,
    clip_polygon_near,
    derived_pitch_deg,
    keypoint_visibility,
    project,
    project_points,
    project_polygon,
)


def make_config(**kwargs):
    defaults = dict(distance_m=100.0, height_m=50.0, focal_length_mm=36.0)
    defaults.update(kwargs)
    return CameraConfig(**defaults)


class TestPitchDerivation:
    def test_aligned_heights_give_zero_pitch(self):
        assert derived_pitch_deg(89.0, 123.0) == pytest.approx(0.0)

    def test_high_camera_pitches_down_45(self):
        assert derived_pitch_deg(189.0, 100.0) == pytest.approx(-45.0)

    def test_aim_point_lands_on_center_row(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            cfg = make_config(
                height_m=float(rng.uniform(10, 260)),
                distance_m=float(rng.uniform(80, 800)),
                roll_deg=float(rng.normal(0, 3)),
            )
            pp = project((0.0, 0.0, 89.0), camera_pose(cfg))
            assert pp is not None
            assert abs(pp.v - cfg.image_size[1] / 2) < 0.5
            assert abs(pp.u - cfg.image_size[0] / 2) < 0.5


class TestProjection:
    def test_principal_point_on_optical_axis(self):
        cfg = make_config(height_m=89.0)  # pitch 0, looking along +y
        pp = project((0.0, 50.0, 89.0), camera_pose(cfg))
        assert (pp.u, pp.v) == (640.0, 360.0)
        assert pp.depth == pytest.approx(150.0)

    def test_focal_length_scales_offsets_linearly(self):
        point = (13.0, 100.0, 60.0)
        p1 = project(point, camera_pose(make_config(focal_length_mm=10.0)))
        p2 = project(point, camera_pose(make_config(focal_length_mm=20.0)))
        cx, cy = 640.0, 360.0
        assert p2.u - cx == pytest.approx(2 * (p1.u - cx))
        assert p2.v - cy == pytest.approx(2 * (p1.v - cy))

    def test_behind_camera_returns_none(self):
        cfg = make_config()
        assert project((0.0, -500.0, 10.0), camera_pose(cfg)) is None

    def test_scale_consistency(self):
        # scaling the world and the camera placement together changes nothing
        rng = np.random.default_rng(1)
        for _ in range(20):
            k = float(rng.uniform(0.2, 5.0))
            d, h = float(rng.uniform(50, 300)), float(rng.uniform(10, 200))
            point = rng.uniform([-100, 50, 0], [100, 400, 150])
            base = make_config(distance_m=d, height_m=h, aim_point=(0, 0, 89.0))
            scaled = make_config(
                distance_m=k * d, height_m=k * h, aim_point=(0, 0, 89.0 * k)
            )
            p1 = project(point, camera_pose(base))
            p2 = project(point * k, camera_pose(scaled))
            assert p1 is not None and p2 is not None
            assert p1.u == pytest.approx(p2.u, abs=1e-6)
            assert p1.v == pytest.approx(p2.v, abs=1e-6)

    def test_hand_built_pose_with_roll(self):
        # independent derivation of the same convention: explicit basis
        # construction with plain trig, no shared code with camera.py
        cfg = make_config(distance_m=100.0, height_m=50.0, focal_length_mm=36.0, roll_deg=10.0)
        cam = np.array([0.0, -100.0, 50.0])
        f = np.array([0.0, 100.0, 39.0])
        f = f / math.sqrt(100.0**2 + 39.0**2)
        right = np.array([1.0, 0.0, 0.0])
        down = np.cross(f, right)
        rho = math.radians(10.0)
        right_r = right * math.cos(rho) + down * math.sin(rho)
        down_r = -right * math.sin(rho) + down * math.cos(rho)
        f_px = 36.0 * 1280 / 36.0

        pose = camera_pose(cfg)
        rng = np.random.default_rng(2)
        for _ in range(10):
            p = rng.uniform([-80, 20, 0], [80, 500, 200])
            rel = p - cam
            z = float(np.dot(f, rel))
            expect_u = 640.0 + f_px * float(np.dot(right_r, rel)) / z
            expect_v = 360.0 + f_px * float(np.dot(down_r, rel)) / z
            got = project(p, pose)
            assert got.u == pytest.approx(expect_u, abs=1e-9)
            assert got.v == pytest.approx(expect_v, abs=1e-9)

    def test_hub_centering_reaims_camera(self):
        cfg = make_config(center_on_hub=True, aim_point=(0.0, 150.0, 89.0))
        pp = project((0.0, 150.0, 89.0), camera_pose(cfg))
        assert abs(pp.u - 640.0) < 0.5 and abs(pp.v - 360.0) < 0.5

    def test_project_points_matches_single(self):
        cfg = make_config()
        pose = camera_pose(cfg)
        pts = np.array([[0.0, 100.0, 50.0], [10.0, -500.0, 5.0], [3.0, 80.0, 20.0]])
        batch = project_points(pts, pose)
        for row, got in zip(pts, batch):
            single = project(row, pose)
            if single is None:
                assert got is None
            else:
                assert got == single


class TestVisibility:
    def test_in_frame_visible(self):
        assert keypoint_visibility(PixelPoint(640.0, 360.0, 100.0), (1280, 720)) == 2

    def test_out_of_frame(self):
        assert keypoint_visibility(PixelPoint(-3.0, 360.0, 100.0), (1280, 720)) == 0
        assert keypoint_visibility(PixelPoint(1280.0, 360.0, 100.0), (1280, 720)) == 0

    def test_behind_camera_marker(self):
        assert keypoint_visibility(None, (1280, 720)) == 0


class TestBoundingBox:
    def test_box_over_inside_vertices(self):
        pts = [PixelPoint(10, 20, 5), PixelPoint(100, 200, 5), PixelPoint(50, 30, 5)]
        assert bbox_from_projection(pts, (1280, 720)) == (10, 20, 100, 200)

    def test_fully_outside_returns_none(self):
        pts = [PixelPoint(-50, 100, 5), PixelPoint(-10, 300, 5)]
        assert bbox_from_projection(pts, (1280, 720)) is None

    def test_straddling_clips_to_edge(self):
        pts = [PixelPoint(1200, 100, 5), PixelPoint(1500, 300, 5)]
        assert bbox_from_projection(pts, (1280, 720)) == (1200, 100, 1280, 300)

    def test_degenerate_sliver_returns_none(self):
        pts = [PixelPoint(10, 10, 5), PixelPoint(11, 500, 5)]
        assert bbox_from_projection(pts, (1280, 720)) is None

    def test_behind_camera_vertices_ignored(self):
        pts = [PixelPoint(10, 20, 5), None, PixelPoint(100, 200, 5)]
        assert bbox_from_projection(pts, (1280, 720)) == (10, 20, 100, 200)

    def test_monotone_under_added_vertex(self):
        rng = np.random.default_rng(3)
        pts = [PixelPoint(*rng.uniform(0, 700, 2), 5.0) for _ in range(5)]
        base = bbox_from_projection(pts, (1280, 720))
        grown = bbox_from_projection(pts + [PixelPoint(701.0, 10.0, 5.0)], (1280, 720))
        assert grown[0] <= base[0] and grown[1] <= base[1]
        assert grown[2] >= base[2] and grown[3] >= base[3]


class TestNearClipping:
    def test_polygon_fully_in_front_unchanged(self):
        poly = np.array([[0, 0, 5.0], [1, 0, 5.0], [1, 1, 5.0]])
        out = clip_polygon_near(poly)
        np.testing.assert_allclose(out, poly)

    def test_polygon_fully_behind_empty(self):
        poly = np.array([[0, 0, -5.0], [1, 0, -5.0], [1, 1, -5.0]])
        assert len(clip_polygon_near(poly)) == 0

    def test_straddling_polygon_is_cut_at_plane(self):
        poly = np.array([[0.0, 0.0, 2.0], [1.0, 0.0, 2.0], [0.5, 0.0, -2.0]])
        out = clip_polygon_near(poly, z_near=0.1)
        assert len(out) == 4
        assert (out[:, 2] >= 0.1 - 1e-12).all()

    def test_project_polygon_handles_straddle(self):
        cfg = make_config()
        pose = camera_pose(cfg)
        # one vertex far behind the camera
        poly = np.array([[0.0, 50.0, 50.0], [5.0, 60.0, 50.0], [0.0, -300.0, 50.0]])
        out = project_polygon(poly, pose)
        assert len(out) >= 3
        assert np.isfinite(out).all()
