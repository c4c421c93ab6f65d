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

"""Projective polarization camera model.

Angles passed as ``*_deg`` are degrees; everything else is radians. Maps are
numpy arrays shaped (height, width[, channels]).
"""

from ._core import (
    Intrinsics,
    PolarprojError,
    aolp,
    backproject,
    dolp,
    dolp_specular,
    effective_angle,
    effective_angles,
    estimate_plane_normal,
    estimate_stokes,
    intensity_through_polarizer,
    local_frame,
    set_strict_mode,
    set_thread_limit,
    simulate_plane,
    zenith_from_dolp,
)

__version__ = "0.3.0"

__all__ = [
    "Intrinsics",
    "PolarprojError",
    "aolp",
    "backproject",
    "dolp",
    "dolp_specular",
    "effective_angle",
    "effective_angles",
    "estimate_plane_normal",
    "estimate_stokes",
    "intensity_through_polarizer",
    "local_frame",
    "set_strict_mode",
    "set_thread_limit",
    "simulate_plane",
    "zenith_from_dolp",
]
