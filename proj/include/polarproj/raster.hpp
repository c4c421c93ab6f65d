// Copyright 2026 The polarproj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <vector>

#include "polarproj/error.hpp"

namespace polarproj {

/// Row-major, interleaved-channel raster. Row 0 is the top image row.
template <class T>
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<T> data;

  Raster() = default;
  Raster(int w, int h, int c = 1, T fill = T{})
      : width(w), height(h), channels(c),
        data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c), fill) {
    if (w < 0 || h < 0 || c < 1) fail(ErrorKind::DomainError, "invalid raster dimensions");
  }

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }

  T& at(int x, int y, int c = 0) { return data[index(x, y) * channels + c]; }
  const T& at(int x, int y, int c = 0) const { return data[index(x, y) * channels + c]; }

  bool same_shape(int w, int h) const { return width == w && height == h; }
};

using Image = Raster<double>;
using Mask = Raster<unsigned char>;

}  // namespace polarproj
