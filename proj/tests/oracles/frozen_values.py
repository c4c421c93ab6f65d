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

"""Independent high-precision oracle for the constants frozen into the C++ tests.

Everything here is computed with mpmath from first principles (closed forms,
explicit matrix inverses, plain vector algebra); none of it calls into the
library. Re-run with `python3 tests/oracles/frozen_values.py` to regenerate.
"""
import mpmath as mp

mp.mp.dps = 40


def polarizer_row(alpha):
    return [mp.mpf(1) / 2, mp.cos(2 * alpha) / 2, mp.sin(2 * alpha) / 2]


def cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def norm(a):
    return mp.sqrt(sum(x * x for x in a))


def unit(a):
    n = norm(a)
    return [x / n for x in a]


def effective_angle(ray, alpha):
    rz = unit(ray)
    rx = unit(cross([0, 1, 0], rz))
    ry = cross(rz, rx)
    absorb = [mp.cos(alpha + mp.pi / 2), mp.sin(alpha + mp.pi / 2), 0]
    local = [sum(r[i] * absorb[i] for i in range(3)) for r in (rx, ry, rz)]
    t = unit(cross([0, 0, 1], local))
    return mp.atan2(t[1], t[0]) % mp.pi


def dolp_specular(n, a, th):
    s2 = mp.sin(th) ** 2
    num = 2 * s2 * mp.cos(th) * mp.sqrt(n * n - s2)
    den = n * n - s2 - n * n * s2 + 2 * s2 * s2
    return a * num / den


def backproject(fx, fy, cx, cy, skew, u, v):
    K = mp.matrix([[fx, skew, cx], [0, fy, cy], [0, 0, 1]])
    d = mp.inverse(K) * mp.matrix([u, v, 1])
    return unit([d[0], d[1], d[2]])


def local_basis(ray):
    rz = unit(ray)
    rx = unit(cross([0, 1, 0], rz))
    ry = cross(rz, rx)
    return rx, ry, rz


def sensor_ray(u, v):
    # 2448 x 2048 sensor, fx = fy = 2300, principal point at the image centre.
    return [(u - mp.mpf(2447) / 2) / 2300, (v - mp.mpf(2047) / 2) / 2300, 1]


def tilted_normal(tilt_deg, azimuth_deg):
    t, a = mp.radians(tilt_deg), mp.radians(azimuth_deg)
    return [mp.sin(t) * mp.cos(a), mp.sin(t) * mp.sin(a), -mp.cos(t)]


def plane_pixel(ray, normal, n=mp.mpf("1.5"), a=1):
    rx, ry, rz = local_basis(ray)
    local = [sum(r[i] * normal[i] for i in range(3)) for r in (rx, ry, rz)]
    zenith = mp.atan2(mp.sqrt(local[0] ** 2 + local[1] ** 2), -local[2])
    phi = mp.atan2(local[1], local[0]) % mp.pi
    rho = dolp_specular(n, a, zenith)
    return [1, rho * mp.cos(2 * phi), rho * mp.sin(2 * phi)], phi


def corner_margin(u, v):
    ray = sensor_ray(u, v)
    stokes, _ = plane_pixel(ray, tilted_normal(30, 15))
    worst = 0
    for deg in (0, 45, 90, 135):
        alpha = mp.radians(deg)
        hat = effective_angle(ray, alpha)
        tilted = (stokes[0] + stokes[1] * mp.cos(2 * hat) + stokes[2] * mp.sin(2 * hat)) / 2
        naive = (stokes[0] + stokes[1] * mp.cos(2 * alpha) + stokes[2] * mp.sin(2 * alpha)) / 2
        worst = max(worst, abs(tilted - naive))
    return worst


if __name__ == "__main__":
    print("polarizer pi/8 row0:", [mp.nstr(x, 20) for x in polarizer_row(mp.pi / 8)])
    th = mp.radians(30)
    print("eff(30deg, pi/4):", mp.nstr(effective_angle([mp.sin(th), 0, mp.cos(th)], mp.pi / 4), 20))
    print("eff(30deg, 0):", mp.nstr(effective_angle([mp.sin(th), 0, mp.cos(th)], 0), 20))
    print("dolp_specular(1.5, 0.5, 0.6):", mp.nstr(dolp_specular(1.5, 0.5, mp.mpf("0.6")), 20))
    print("backproject skew:", [mp.nstr(x, 20) for x in backproject(1200, 1100, 640, 480, 2.5, 100, 200)])
    print("pgm 32768/65535:", mp.nstr(mp.mpf(32768) / 65535, 20), " 16384/65535:", mp.nstr(mp.mpf(16384) / 65535, 20))
    print("mixture (2,1,1,0) unpolarized s0:", mp.nstr(2 - mp.sqrt(2), 20))
    print("rmse 1,2,3:", mp.nstr(mp.sqrt(mp.mpf(14) / 3), 20))
    print("corner (0,0) tilted-vs-naive margin:", mp.nstr(corner_margin(0, 0), 20))
    print("corner (2447,2047) tilted-vs-naive margin:", mp.nstr(corner_margin(2447, 2047), 20))
    normal = tilted_normal(30, 15)
    print("ortho expected aolp:", mp.nstr(mp.atan2(normal[1], normal[0]) % mp.pi, 20))
    for u, v in ((0, 0), (2447, 0), (0, 2047), (2447, 2047)):
        print("projective aolp", (u, v), mp.nstr(plane_pixel(sensor_ray(u, v), normal)[1], 20))
