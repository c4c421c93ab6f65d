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

"""When ctest sets POLARPROJ_PY_STAGE, import the extension built in that tree.

An editable install registers a meta-path finder that would otherwise take
precedence over PYTHONPATH.
"""

import os
import sys

stage = os.environ.get("POLARPROJ_PY_STAGE")
if stage:
    sys.meta_path[:] = [f for f in sys.meta_path if type(f).__name__ != "ScikitBuildRedirectingFinder"]
    sys.path.insert(0, stage)
    import polarproj._core

    assert os.path.realpath(polarproj._core.__file__).startswith(os.path.realpath(stage)), polarproj._core.__file__
