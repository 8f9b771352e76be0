"""Camera projection, rasterization, color masking and marker detection."""

from dataclasses import replace

import numpy as np
import pytest

from softmanip.errors import ConfigurationError
from softmanip.physics import build_lattice, move_grasper, settle
from softmanip.scenario import Scenario, preset
from softmanip.vision import (GREEN_SPEC, CameraPose, Observation, color_mask,
                              detect_ttps, project, read_ppm, render_frame,
                              rgb_to_hsv, write_ppm)

DOWN_CAMERA = CameraPose(position=(0.0, 0.0, 0.10), look_at=(0.0, 0.0, 0.0),
                         up=(0.0, 1.0, 0.0), focal_px=450.0, width=320, height=240)


def fresh_scene(scenario=None):
    scenario = scenario or Scenario()
    model = build_lattice(scenario)
    seeds = [np.asarray(project(scenario.camera, model.positions[n]))
             for n in (scenario.ttp1, scenario.ttp2)]
    previous = Observation(ttp1=seeds[0], ttp2=seeds[1], visible1=True, visible2=True)
    return scenario, model, previous


class TestProjection:
    def test_optical_axis_maps_to_image_center(self):
        for depth in (0.01, 0.05, 0.099):
            px, py = project(DOWN_CAMERA, (0.0, 0.0, 0.10 - depth))
            assert px == pytest.approx(160.0, abs=1e-12)
            assert py == pytest.approx(120.0, abs=1e-12)

    def test_lateral_offset_scales_by_similar_triangles(self):
        for t in (0.001, -0.004, 0.02):
            px, py = project(DOWN_CAMERA, (t, 0.0, 0.0))
            assert px - 160.0 == pytest.approx(450.0 * t / 0.10, rel=1e-12)
            assert py == pytest.approx(120.0, abs=1e-9)
        px, py = project(DOWN_CAMERA, (0.0, 0.004, 0.0))
        assert py - 120.0 == pytest.approx(-450.0 * 0.004 / 0.10, rel=1e-12)

    def test_points_behind_or_beside_the_camera_are_dropped(self):
        assert project(DOWN_CAMERA, (0.0, 0.0, 0.2)) is None
        assert project(DOWN_CAMERA, (0.05, 0.0, 0.10)) is None

    def test_basis_is_orthonormal_for_random_poses(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            pose = CameraPose(position=tuple(rng.normal(size=3)),
                              look_at=tuple(rng.normal(size=3)),
                              up=tuple(rng.normal(size=3)))
            try:
                pose.validate()
            except ConfigurationError:
                continue
            right, up, forward = pose.basis()
            for v in (right, up, forward):
                assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
            assert abs(right @ up) < 1e-12
            assert abs(right @ forward) < 1e-12
            assert abs(up @ forward) < 1e-12

    def test_invalid_poses_are_rejected(self):
        good = dict(position=(0.0, 0.0, 1.0), look_at=(0.0, 0.0, 0.0), up=(0.0, 1.0, 0.0))
        CameraPose(**good).validate()
        bad = [
            dict(good, look_at=(0.0, 0.0, 1.0)),
            dict(good, up=(0.0, 0.0, 0.0)),
            dict(good, up=(0.0, 0.0, -2.0)),
        ]
        for kwargs in bad:
            with pytest.raises(ConfigurationError):
                CameraPose(**kwargs).validate()
        with pytest.raises(ConfigurationError):
            CameraPose(**good, focal_px=0.0).validate()
        with pytest.raises(ConfigurationError):
            CameraPose(**good, width=0).validate()


class TestColorSpace:
    def test_hsv_of_primary_colors(self):
        img = np.array([[[255, 0, 0], [0, 255, 0], [0, 0, 255],
                         [128, 128, 128], [0, 0, 0]]], dtype=np.uint8)
        hsv = rgb_to_hsv(img)[0]
        assert hsv[0] == pytest.approx([0.0, 1.0, 1.0], abs=1e-6)
        assert hsv[1] == pytest.approx([120.0, 1.0, 1.0], abs=1e-6)
        assert hsv[2] == pytest.approx([240.0, 1.0, 1.0], abs=1e-6)
        assert hsv[3][1] == 0.0
        assert hsv[4][2] == 0.0

    def test_mask_of_black_frame_is_empty(self):
        img = np.zeros((32, 48, 3), dtype=np.uint8)
        assert color_mask(img, GREEN_SPEC).shape == (0, 2)

    def test_mask_finds_a_single_green_pixel(self):
        img = np.zeros((32, 48, 3), dtype=np.uint8)
        img[20, 10] = (0, 200, 0)
        pts = color_mask(img, GREEN_SPEC)
        assert pts.tolist() == [[10, 20]]

    def test_prefiltered_mask_equals_exhaustive_hsv_test(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            img = rng.integers(0, 256, size=(40, 56, 3), dtype=np.uint8)
            got = color_mask(img, GREEN_SPEC)
            hsv = rgb_to_hsv(img)
            keep = ((hsv[..., 0] >= GREEN_SPEC.hue_min)
                    & (hsv[..., 0] <= GREEN_SPEC.hue_max)
                    & (hsv[..., 1] >= GREEN_SPEC.sat_min)
                    & (hsv[..., 2] >= GREEN_SPEC.val_min))
            ys, xs = np.nonzero(keep)
            want = sorted(zip(xs.tolist(), ys.tolist()))
            assert sorted(map(tuple, got.tolist())) == want


class TestRendering:
    def test_marker_disks_cover_their_expected_area(self):
        scenario, model, _ = fresh_scene()
        frame = render_frame(model, scenario, scenario.camera)
        r_px = scenario.camera.focal_px * scenario.ttp_marker_radius / 0.10
        expected = 2.0 * np.pi * r_px ** 2
        count = color_mask(frame, GREEN_SPEC).shape[0]
        assert count >= 0.9 * expected
        assert abs(count - expected) <= 0.1 * expected

    def test_forced_cover_removes_one_marker(self):
        scenario, model, previous = fresh_scene()
        frame = render_frame(model, scenario, scenario.camera, occlude_ttps=(1,))
        obs = detect_ttps(frame, scenario, previous)
        assert not obs.visible1
        assert obs.visible2
        near1 = np.asarray(previous.ttp1)
        pts = color_mask(frame, GREEN_SPEC)
        dists = np.hypot(pts[:, 0] - near1[0], pts[:, 1] - near1[1])
        assert not np.any(dists < 20.0)

    def test_covering_both_markers_leaves_no_green(self):
        scenario, model, _ = fresh_scene()
        frame = render_frame(model, scenario, scenario.camera, occlude_ttps=(1, 2))
        assert color_mask(frame, GREEN_SPEC).shape[0] == 0


class TestDetection:
    def test_detected_centers_match_projections(self):
        scenario, model, previous = fresh_scene()
        frame = render_frame(model, scenario, scenario.camera)
        obs = detect_ttps(frame, scenario, previous)
        assert obs.visible1 and obs.visible2
        for node, center in ((scenario.ttp1, obs.ttp1), (scenario.ttp2, obs.ttp2)):
            px, py = project(scenario.camera, model.positions[node])
            assert np.hypot(center[0] - px, center[1] - py) <= 1.5

    def test_occluded_marker_keeps_previous_coordinates(self):
        scenario, model, previous = fresh_scene()
        frame = render_frame(model, scenario, scenario.camera, occlude_ttps=(1,))
        obs = detect_ttps(frame, scenario, previous)
        assert not obs.visible1
        assert np.array_equal(obs.ttp1, previous.ttp1)

    def test_black_frame_reports_both_markers_stale(self):
        scenario, _, previous = fresh_scene()
        frame = np.zeros((240, 320, 3), dtype=np.uint8)
        obs = detect_ttps(frame, scenario, previous)
        assert not obs.visible1 and not obs.visible2
        assert np.array_equal(obs.ttp1, previous.ttp1)
        assert np.array_equal(obs.ttp2, previous.ttp2)

    def test_growing_overlap_never_restores_visibility(self):
        scenario, model, previous = fresh_scene()
        marker_x = model.positions[scenario.ttp1, 0]
        flags = []
        for offset_px in np.arange(30.0, -0.5, -2.0):
            # place grasper 1 so its avatar center lands offset_px to the
            # right of the marker center in the image
            gx = (marker_x / 0.10 + offset_px / scenario.camera.focal_px) * 0.08
            model.graspers[0].position[0] = gx
            model.graspers[0].position[1] = model.positions[scenario.ttp1, 1] / 0.10 * 0.08
            frame = render_frame(model, scenario, scenario.camera)
            flags.append(detect_ttps(frame, scenario, previous).visible1)
        assert flags[0] is True
        assert flags[-1] is False
        first_false = flags.index(False)
        assert not any(flags[first_false:])

    def test_detection_tracks_projections_through_a_long_rollout(self):
        scenario, model, obs = fresh_scene(preset("c1"))
        rng = np.random.default_rng(7)
        checked = 0
        for _ in range(200):
            move_grasper(model, 1, int(rng.integers(5)))
            move_grasper(model, 2, int(rng.integers(5)))
            settle(model, scenario.settle_steps)
            frame = render_frame(model, scenario, scenario.camera)
            obs = detect_ttps(frame, scenario, previous=obs)
            for node, center, visible in ((scenario.ttp1, obs.ttp1, obs.visible1),
                                          (scenario.ttp2, obs.ttp2, obs.visible2)):
                if visible:
                    assert 0.0 <= center[0] < scenario.camera.width
                    assert 0.0 <= center[1] < scenario.camera.height
                proj = project(scenario.camera, model.positions[node])
                margin = 8.0
                in_frame = (proj is not None
                            and margin <= proj[0] < scenario.camera.width - margin
                            and margin <= proj[1] < scenario.camera.height - margin)
                if visible and in_frame:
                    assert np.hypot(center[0] - proj[0], center[1] - proj[1]) <= 1.5
                    checked += 1
        assert checked > 250


class TestPpmFiles:
    def test_round_trip_preserves_every_byte(self, tmp_path):
        rng = np.random.default_rng(3)
        img = rng.integers(0, 256, size=(24, 30, 3), dtype=np.uint8)
        path = tmp_path / "frame.ppm"
        write_ppm(img, path)
        raw = path.read_bytes()
        assert raw.startswith(b"P6\n30 24\n255\n")
        assert np.array_equal(read_ppm(path), img)

    def test_rejects_other_formats(self, tmp_path):
        path = tmp_path / "bad.ppm"
        path.write_bytes(b"P5\n2 2\n255\n" + bytes(4))
        with pytest.raises(ConfigurationError):
            read_ppm(path)
        path.write_bytes(b"P6\n2 2\n127\n" + bytes(12))
        with pytest.raises(ConfigurationError):
            read_ppm(path)
