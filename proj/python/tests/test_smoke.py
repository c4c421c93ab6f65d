# Copyright 2026 The polarproj Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import polarproj as pp


@pytest.fixture
def camera():
    return pp.Intrinsics(fx=60.0, fy=60.0, cx=31.5, cy=23.5, width=64, height=48)


def test_principal_point_ray_is_the_optical_axis(camera):
    assert pp.backproject(camera, camera.cx, camera.cy) == pytest.approx((0.0, 0.0, 1.0))
    frame = pp.local_frame(0.0, 0.0, 1.0)
    np.testing.assert_allclose(frame, np.eye(3), atol=1e-15)


def test_effective_angle_matches_yaw_formula():
    theta, alpha = math.radians(30), math.radians(40)
    expected = math.atan(math.cos(theta) * math.tan(alpha))
    got = pp.effective_angle(math.sin(theta), 0.0, math.cos(theta), alpha)
    assert got == pytest.approx(expected, abs=1e-12)


def test_effective_angle_field_shape(camera):
    eff = pp.effective_angles(camera, [0, 45, 90, 135])
    assert eff.shape == (48, 64, 4)
    assert np.all((eff >= 0) & (eff < math.pi))


def test_polarization_summaries():
    assert pp.dolp(2.0, 1.0, 0.0) == pytest.approx(0.5)
    assert pp.aolp(1.0, 0.0, 0.5) == pytest.approx(math.pi / 4)
    assert pp.intensity_through_polarizer(1.0, 1.0, 0.0, 0.0) == pytest.approx(1.0)


def test_zenith_round_trip():
    rho = pp.dolp_specular(0.6, n=1.5, a=0.5)
    assert rho == pytest.approx(0.25803624500278478027, rel=1e-14)
    assert pp.zenith_from_dolp(rho, n=1.5, a=0.5) == pytest.approx(0.6, abs=1e-9)


def test_simulate_estimate_and_fit_plane(camera):
    sim = pp.simulate_plane(camera, tilt_deg=30, azimuth_deg=15)
    assert sim["images"].shape == (4, 48, 64)
    stokes, status = pp.estimate_stokes(sim["images"], [0, 45, 90, 135], camera)
    assert stokes.shape == (48, 64, 3)
    assert np.all(status == 0)
    np.testing.assert_allclose(stokes, sim["stokes"], atol=1e-12)

    aolp = 0.5 * np.arctan2(stokes[..., 2], stokes[..., 1])
    mask = (np.hypot(stokes[..., 1], stokes[..., 2]) / stokes[..., 0] > 0.005).astype(np.uint8)
    normal, residual, count = pp.estimate_plane_normal(aolp, camera, mask)
    assert count == int(mask.sum())
    cos = float(np.dot(normal, sim["normal"]))
    assert math.degrees(math.acos(min(1.0, cos))) < 0.05


def test_orthographic_pipeline_is_worse_off_axis(camera):
    sim = pp.simulate_plane(camera, tilt_deg=30, azimuth_deg=15)
    proj, _ = pp.estimate_stokes(sim["images"], [0, 45, 90, 135], camera)
    ortho, _ = pp.estimate_stokes(sim["images"], [0, 45, 90, 135], camera, pipeline="ortho")
    err = lambda s: np.abs(s - sim["stokes"]).max()
    assert err(ortho) > 1e3 * err(proj)


def test_errors_carry_their_kind(camera):
    with pytest.raises(pp.PolarprojError) as info:
        pp.estimate_stokes(np.ones((2, 48, 64)), [0, 90], camera)
    assert info.value.kind == "RankDeficient"
    with pytest.raises(ValueError):
        pp.Intrinsics(fx=-1.0, fy=1.0, cx=0.0, cy=0.0, width=2, height=2)
    with pytest.raises(pp.PolarprojError) as info:
        pp.estimate_plane_normal(np.zeros((48, 64)), camera, np.ones((48, 64), np.uint8), pipeline="ortho")
    assert info.value.kind == "DegenerateSystem"
