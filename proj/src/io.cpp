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

#include "polarproj/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "polarproj/error.hpp"

namespace polarproj::io {

namespace {

template <class U>
U byteswap(U v) {
  U out = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out = static_cast<U>((out << 8) | (v & 0xff));
    v = static_cast<U>(v >> 8);
  }
  return out;
}

constexpr std::size_t kMaxPixels = std::size_t{1} << 28;

std::string ext_of(const fs::path& path) {
  auto e = path.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e;
}

/// Minimal cursor over a byte buffer for the text headers of PGM/PFM.
class HeaderCursor {
 public:
  explicit HeaderCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space(bool comments) {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (comments && c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string token(bool comments) {
    skip_space(comments);
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && out.size() < 64) out.push_back(static_cast<char>(bytes_[pos_++]));
    if (out.empty()) fail(ErrorKind::CorruptFile, "truncated header");
    return out;
  }

  long long integer(bool comments, long long lo, long long hi, const char* what) {
    const std::string t = token(comments);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size() || value < lo || value > hi)
      fail(ErrorKind::CorruptFile, std::string("bad ") + what + " in header");
    return value;
  }

  /// Consumes the single whitespace byte separating header and payload.
  void end_of_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail(ErrorKind::CorruptFile, "missing header terminator");
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void append(Bytes& out, std::string_view text) { out.insert(out.end(), text.begin(), text.end()); }

}  // namespace

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::IoError, "write failed for " + path.string());
}

// ---- PFM -------------------------------------------------------------------

Bytes encode_pfm(const FloatMap& map) {
  if (map.channels != 1 && map.channels != 3) fail(ErrorKind::UnsupportedFormat, "PFM holds 1 or 3 channels");
  const std::size_t row = static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.channels);
  if (map.data.size() != row * static_cast<std::size_t>(map.height)) fail(ErrorKind::DomainError, "float map size mismatch");
  Bytes out;
  append(out, map.channels == 3 ? "PF\n" : "Pf\n");
  append(out, std::to_string(map.width) + " " + std::to_string(map.height) + "\n-1.0\n");
  const std::size_t header = out.size();
  out.resize(header + map.data.size() * 4);
  std::uint8_t* dst = out.data() + header;
  for (int r = 0; r < map.height; ++r) {
    const int src_row = map.bottom_up ? r : map.height - 1 - r;
    const float* src = map.data.data() + static_cast<std::size_t>(src_row) * row;
    for (std::size_t i = 0; i < row; ++i) {
      auto bits = std::bit_cast<std::uint32_t>(src[i]);
      if constexpr (std::endian::native == std::endian::big) bits = byteswap(bits);
      std::memcpy(dst, &bits, 4);
      dst += 4;
    }
  }
  return out;
}

FloatMap decode_pfm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != 'F' && bytes[1] != 'f'))
    fail(ErrorKind::UnsupportedFormat, "not a PFM file");
  HeaderCursor cur(bytes.subspan(2));
  FloatMap map;
  map.channels = bytes[1] == 'F' ? 3 : 1;
  map.width = static_cast<int>(cur.integer(false, 1, 1 << 20, "width"));
  map.height = static_cast<int>(cur.integer(false, 1, 1 << 20, "height"));
  const std::string scale_text = cur.token(false);
  double scale = 0.0;
  {
    std::istringstream ss(scale_text);
    ss.imbue(std::locale::classic());
    if (!(ss >> scale) || !ss.eof() || scale == 0.0 || !std::isfinite(scale)) fail(ErrorKind::CorruptFile, "bad PFM scale");
  }
  cur.end_of_header();
  const std::size_t count =
      static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.height) * static_cast<std::size_t>(map.channels);
  if (count / static_cast<std::size_t>(map.channels) > kMaxPixels) fail(ErrorKind::UnsupportedFormat, "PFM too large");
  const std::size_t offset = 2 + cur.pos();
  if (bytes.size() - offset < count * 4) fail(ErrorKind::CorruptFile, "truncated PFM payload");
  const bool little = scale < 0.0;
  const bool swap = little != (std::endian::native == std::endian::little);
  map.data.resize(count);
  const std::size_t row = static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.channels);
  const std::uint8_t* src = bytes.data() + offset;
  for (int r = 0; r < map.height; ++r) {
    float* dst = map.data.data() + static_cast<std::size_t>(map.height - 1 - r) * row;
    for (std::size_t i = 0; i < row; ++i) {
      std::uint32_t bits = 0;
      std::memcpy(&bits, src, 4);
      src += 4;
      if (swap) bits = byteswap(bits);
      dst[i] = std::bit_cast<float>(bits);
    }
  }
  return map;
}

void write_pfm(const FloatMap& map, const fs::path& path) { write_file(path, encode_pfm(map)); }

FloatMap read_pfm(const fs::path& path) { return decode_pfm(read_file(path)); }

// ---- NPY -------------------------------------------------------------------

namespace {

constexpr std::string_view kNpyMagic = "\x93NUMPY";

bool has_npy_magic(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kNpyMagic.size()) return false;
  for (std::size_t i = 0; i < kNpyMagic.size(); ++i)
    if (bytes[i] != static_cast<std::uint8_t>(kNpyMagic[i])) return false;
  return true;
}

}  // namespace

Bytes encode_npy(const NpyArray& array) {
  std::size_t expected = 1;
  for (auto d : array.shape) expected *= d;
  if (expected != array.data.size()) fail(ErrorKind::DomainError, "NPY shape does not match data");
  std::string shape = "(";
  for (std::size_t i = 0; i < array.shape.size(); ++i) {
    shape += std::to_string(array.shape[i]);
    if (array.shape.size() == 1 || i + 1 < array.shape.size()) shape += ",";
    if (i + 1 < array.shape.size()) shape += " ";
  }
  shape += ")";
  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': " + shape + ", }";
  const std::size_t unpadded = kNpyMagic.size() + 4 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');
  Bytes out;
  append(out, kNpyMagic);
  out.push_back(1);
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(header.size() & 0xff));
  out.push_back(static_cast<std::uint8_t>(header.size() >> 8));
  append(out, header);
  const std::size_t base = out.size();
  out.resize(base + array.data.size() * 8);
  for (std::size_t i = 0; i < array.data.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(array.data[i]);
    if constexpr (std::endian::native == std::endian::big) bits = byteswap(bits);
    std::memcpy(out.data() + base + i * 8, &bits, 8);
  }
  return out;
}

NpyArray decode_npy(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 10 || !has_npy_magic(bytes))
    fail(ErrorKind::UnsupportedFormat, "not an NPY file");
  const int major = bytes[6];
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = bytes[8] | (static_cast<std::size_t>(bytes[9]) << 8);
    offset = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) fail(ErrorKind::CorruptFile, "truncated NPY header");
    header_len = bytes[8] | (static_cast<std::size_t>(bytes[9]) << 8) | (static_cast<std::size_t>(bytes[10]) << 16) |
                 (static_cast<std::size_t>(bytes[11]) << 24);
    offset = 12;
  } else {
    fail(ErrorKind::UnsupportedFormat, "unsupported NPY version");
  }
  if (bytes.size() - offset < header_len) fail(ErrorKind::CorruptFile, "truncated NPY header");
  const std::string header(reinterpret_cast<const char*>(bytes.data() + offset), header_len);
  offset += header_len;

  auto value_of = [&](const std::string& key) -> std::string {
    const auto k = header.find("'" + key + "'");
    if (k == std::string::npos) fail(ErrorKind::CorruptFile, "NPY header lacks " + key);
    auto colon = header.find(':', k);
    if (colon == std::string::npos) fail(ErrorKind::CorruptFile, "malformed NPY header");
    auto start = header.find_first_not_of(' ', colon + 1);
    if (start == std::string::npos) fail(ErrorKind::CorruptFile, "malformed NPY header");
    std::size_t end = start;
    if (header[start] == '(') {
      end = header.find(')', start);
      if (end == std::string::npos) fail(ErrorKind::CorruptFile, "malformed NPY shape");
      return header.substr(start + 1, end - start - 1);
    }
    end = header.find_first_of(",}", start);
    if (end == std::string::npos) fail(ErrorKind::CorruptFile, "malformed NPY header");
    std::string v = header.substr(start, end - start);
    while (!v.empty() && v.back() == ' ') v.pop_back();
    if (v.size() >= 2 && (v.front() == '\'' || v.front() == '"')) v = v.substr(1, v.size() - 2);
    return v;
  };

  const std::string descr = value_of("descr");
  if (value_of("fortran_order") != "False") fail(ErrorKind::UnsupportedFormat, "Fortran-ordered NPY arrays are not supported");
  NpyArray array;
  {
    std::string shape = value_of("shape");
    std::size_t i = 0;
    while (i < shape.size()) {
      while (i < shape.size() && (shape[i] == ' ' || shape[i] == ',')) ++i;
      if (i >= shape.size()) break;
      std::size_t v = 0;
      const auto [ptr, ec] = std::from_chars(shape.data() + i, shape.data() + shape.size(), v);
      if (ec != std::errc{}) fail(ErrorKind::CorruptFile, "malformed NPY shape");
      array.shape.push_back(v);
      i = static_cast<std::size_t>(ptr - shape.data());
    }
  }
  std::size_t count = 1;
  for (auto d : array.shape) {
    if (d != 0 && count > kMaxPixels * 8 / d) fail(ErrorKind::UnsupportedFormat, "NPY array too large");
    count *= d;
  }
  std::size_t itemsize = 0;
  if (descr == "<f8") itemsize = 8;
  else if (descr == "<f4") itemsize = 4;
  else if (descr == "<u2") itemsize = 2;
  else if (descr == "|u1") itemsize = 1;
  else fail(ErrorKind::UnsupportedFormat, "unsupported NPY dtype " + descr);
  if (bytes.size() - offset < count * itemsize) fail(ErrorKind::CorruptFile, "truncated NPY payload");
  array.data.resize(count);
  const std::uint8_t* src = bytes.data() + offset;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t* p = src + i * itemsize;
    switch (itemsize) {
      case 8: {
        std::uint64_t b = 0;
        std::memcpy(&b, p, 8);
        if constexpr (std::endian::native == std::endian::big) b = byteswap(b);
        array.data[i] = std::bit_cast<double>(b);
        break;
      }
      case 4: {
        std::uint32_t b = 0;
        std::memcpy(&b, p, 4);
        if constexpr (std::endian::native == std::endian::big) b = byteswap(b);
        array.data[i] = std::bit_cast<float>(b);
        break;
      }
      case 2: array.data[i] = static_cast<double>(p[0] | (p[1] << 8)); break;
      default: array.data[i] = static_cast<double>(p[0]); break;
    }
  }
  return array;
}

// ---- PGM -------------------------------------------------------------------

RawImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') fail(ErrorKind::UnsupportedFormat, "not a PGM file");
  if (bytes[1] != '5') fail(ErrorKind::UnsupportedFormat, "only binary PGM (P5) is supported");
  HeaderCursor cur(bytes.subspan(2));
  const auto width = static_cast<int>(cur.integer(true, 1, 1 << 20, "width"));
  const auto height = static_cast<int>(cur.integer(true, 1, 1 << 20, "height"));
  const auto maxval = static_cast<unsigned>(cur.integer(true, 1, 65535, "maxval"));
  cur.end_of_header();
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (count > kMaxPixels) fail(ErrorKind::UnsupportedFormat, "PGM too large");
  const std::size_t bps = maxval > 255 ? 2 : 1;
  const std::size_t offset = 2 + cur.pos();
  if (bytes.size() - offset < count * bps) fail(ErrorKind::CorruptFile, "truncated PGM payload");
  RawImage out;
  out.pixels = Image(width, height);
  out.maxval = maxval;
  out.bit_depth = bps == 2 ? 16 : 8;
  const std::uint8_t* src = bytes.data() + offset;
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned sample = bps == 2 ? (static_cast<unsigned>(src[2 * i]) << 8) | src[2 * i + 1] : src[i];
    if (sample > maxval) fail(ErrorKind::CorruptFile, "PGM sample exceeds maxval");
    out.pixels.data[i] = static_cast<double>(sample) / static_cast<double>(maxval);
  }
  return out;
}

Bytes encode_pgm(const Raster<std::uint16_t>& image, unsigned maxval) {
  if (maxval < 1 || maxval > 65535) fail(ErrorKind::DomainError, "PGM maxval must be in 1..65535");
  if (image.channels != 1) fail(ErrorKind::UnsupportedFormat, "PGM holds one channel");
  Bytes out;
  append(out, "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n" + std::to_string(maxval) + "\n");
  const bool wide = maxval > 255;
  out.reserve(out.size() + image.data.size() * (wide ? 2 : 1));
  for (auto v : image.data) {
    if (v > maxval) fail(ErrorKind::DomainError, "sample exceeds maxval");
    if (wide) out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return out;
}

// ---- PNG -------------------------------------------------------------------

namespace {

struct PngSource {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void png_read_memory(png_structp png, png_bytep out, png_size_t length) {
  auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
  if (src->bytes.size() - src->pos < length) png_error(png, "truncated PNG");
  std::memcpy(out, src->bytes.data() + src->pos, length);
  src->pos += length;
}

void png_write_memory(png_structp png, png_bytep data, png_size_t length) {
  auto* dst = static_cast<Bytes*>(png_get_io_ptr(png));
  dst->insert(dst->end(), data, data + length);
}

void png_flush_nothing(png_structp) {}

void png_quiet_warning(png_structp, png_const_charp) {}

struct PngErrorText {
  char text[160] = "corrupt PNG data";
};

void png_record_error(png_structp png, png_const_charp message) {
  auto* sink = static_cast<PngErrorText*>(png_get_error_ptr(png));
  if (sink && message) {
    std::strncpy(sink->text, message, sizeof(sink->text) - 1);
    sink->text[sizeof(sink->text) - 1] = '\0';
  }
  png_longjmp(png, 1);
}

}  // namespace

RawImage decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) fail(ErrorKind::UnsupportedFormat, "not a PNG file");
  PngErrorText error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_record_error, png_quiet_warning);
  if (!png) fail(ErrorKind::IoError, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorKind::IoError, "libpng initialisation failed");
  }
  PngSource source{bytes, 0};
  RawImage out;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> buffer;
  const char* problem = nullptr;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::CorruptFile, std::string("PNG: ") + error.text);
  }
  png_set_read_fn(png, &source, png_read_memory);
  png_set_user_limits(png, 1u << 20, 1u << 20);
  png_read_info(png, info);
  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (color != PNG_COLOR_TYPE_GRAY) problem = "only single-channel grayscale PNG is supported";
  else if (depth != 8 && depth != 16) problem = "only 8- or 16-bit PNG is supported";
  else if (static_cast<std::size_t>(width) * height > kMaxPixels) problem = "PNG too large";
  if (problem == nullptr) {
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    buffer.resize(rowbytes * height);
    rows.resize(height);
    for (png_uint_32 r = 0; r < height; ++r) rows[r] = buffer.data() + r * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (problem != nullptr) fail(ErrorKind::UnsupportedFormat, problem);

  out.bit_depth = depth;
  out.maxval = depth == 16 ? 65535u : 255u;
  out.pixels = Image(static_cast<int>(width), static_cast<int>(height));
  const double scale = 1.0 / static_cast<double>(out.maxval);
  for (std::size_t i = 0; i < out.pixels.data.size(); ++i) {
    const unsigned sample = depth == 16 ? (static_cast<unsigned>(buffer[2 * i]) << 8) | buffer[2 * i + 1] : buffer[i];
    out.pixels.data[i] = static_cast<double>(sample) * scale;
  }
  return out;
}

Bytes encode_png(const Raster<std::uint16_t>& image, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) fail(ErrorKind::UnsupportedFormat, "PNG bit depth must be 8 or 16");
  if (image.channels != 1) fail(ErrorKind::UnsupportedFormat, "PNG writer handles one channel");
  const std::size_t bps = bit_depth == 16 ? 2 : 1;
  std::vector<std::uint8_t> buffer(image.data.size() * bps);
  for (std::size_t i = 0; i < image.data.size(); ++i) {
    const auto v = image.data[i];
    if (bit_depth == 8) {
      if (v > 255) fail(ErrorKind::DomainError, "sample exceeds 8-bit range");
      buffer[i] = static_cast<std::uint8_t>(v);
    } else {
      buffer[2 * i] = static_cast<std::uint8_t>(v >> 8);
      buffer[2 * i + 1] = static_cast<std::uint8_t>(v & 0xff);
    }
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  for (int r = 0; r < image.height; ++r) rows[static_cast<std::size_t>(r)] = buffer.data() + static_cast<std::size_t>(r) * image.width * bps;

  Bytes out;
  PngErrorText error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_record_error, png_quiet_warning);
  if (!png) fail(ErrorKind::IoError, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::IoError, std::string("PNG encoding failed: ") + error.text);
  }
  png_set_write_fn(png, &out, png_write_memory, png_flush_nothing);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), bit_depth,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

RawImage read_raw_image(const fs::path& path) {
  const Bytes bytes = read_file(path);
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P') return decode_pgm(bytes);
  if (has_npy_magic(bytes)) {
    NpyArray a = decode_npy(bytes);
    if (a.shape.size() != 2) fail(ErrorKind::UnsupportedFormat, "raw NPY images must be 2-D");
    RawImage out;
    out.pixels = Image(static_cast<int>(a.shape[1]), static_cast<int>(a.shape[0]));
    out.pixels.data = std::move(a.data);
    out.bit_depth = 64;
    out.maxval = 0;
    return out;
  }
  fail(ErrorKind::UnsupportedFormat, "unrecognised raw image format: " + path.string());
}

namespace {

Raster<std::uint16_t> quantize(const Image& image, double full_scale, unsigned maxval) {
  if (image.channels != 1) fail(ErrorKind::UnsupportedFormat, "raw images have one channel");
  Raster<std::uint16_t> out(image.width, image.height);
  for (std::size_t i = 0; i < image.data.size(); ++i) {
    const double v = std::clamp(image.data[i] / full_scale, 0.0, 1.0);
    out.data[i] = static_cast<std::uint16_t>(std::lround(v * maxval));
  }
  return out;
}

}  // namespace

void write_raw_image(const Image& image, const fs::path& path, double full_scale, unsigned maxval) {
  if (!(full_scale > 0.0)) fail(ErrorKind::DomainError, "full scale must be > 0");
  const auto ext = ext_of(path);
  if (ext == ".pgm") {
    write_file(path, encode_pgm(quantize(image, full_scale, maxval), maxval));
  } else if (ext == ".png") {
    const int depth = maxval > 255 ? 16 : 8;
    write_file(path, encode_png(quantize(image, full_scale, depth == 16 ? 65535 : 255), depth));
  } else if (ext == ".npy") {
    NpyArray a{{static_cast<std::size_t>(image.height), static_cast<std::size_t>(image.width)}, image.data};
    for (auto& v : a.data) v /= full_scale;
    write_file(path, encode_npy(a));
  } else {
    fail(ErrorKind::UnsupportedFormat, "raw images are written as .pgm, .png or .npy");
  }
}

// ---- real maps ---------------------------------------------------------------

void write_real_map(const Image& map, const fs::path& path) {
  const auto ext = ext_of(path);
  if (ext == ".pfm") {
    FloatMap f;
    f.width = map.width;
    f.height = map.height;
    f.channels = map.channels;
    f.data.assign(map.data.begin(), map.data.end());
    write_pfm(f, path);
  } else if (ext == ".npy") {
    NpyArray a;
    a.shape = {static_cast<std::size_t>(map.height), static_cast<std::size_t>(map.width)};
    if (map.channels > 1) a.shape.push_back(static_cast<std::size_t>(map.channels));
    a.data = map.data;
    write_file(path, encode_npy(a));
  } else {
    fail(ErrorKind::UnsupportedFormat, "float maps are written as .pfm or .npy");
  }
}

Image read_real_map(const fs::path& path) {
  const Bytes bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == 'F' || bytes[1] == 'f')) {
    FloatMap f = decode_pfm(bytes);
    Image out(f.width, f.height, f.channels);
    std::copy(f.data.begin(), f.data.end(), out.data.begin());
    return out;
  }
  NpyArray a = decode_npy(bytes);
  if (a.shape.size() != 2 && a.shape.size() != 3) fail(ErrorKind::UnsupportedFormat, "float maps must be 2-D or 3-D");
  Image out;
  out.height = static_cast<int>(a.shape[0]);
  out.width = static_cast<int>(a.shape[1]);
  out.channels = a.shape.size() == 3 ? static_cast<int>(a.shape[2]) : 1;
  if (out.channels < 1) fail(ErrorKind::UnsupportedFormat, "float maps need at least one channel");
  out.data = std::move(a.data);
  return out;
}

void write_mask_png(const Mask& mask, const fs::path& path) {
  Raster<std::uint16_t> r(mask.width, mask.height);
  std::copy(mask.data.begin(), mask.data.end(), r.data.begin());
  write_file(path, encode_png(r, 8));
}

Mask read_mask_png(const fs::path& path) {
  const RawImage raw = decode_png(read_file(path));
  if (raw.bit_depth != 8) fail(ErrorKind::UnsupportedFormat, "masks are 8-bit PNG");
  Mask out(raw.pixels.width, raw.pixels.height);
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = static_cast<unsigned char>(std::lround(raw.pixels.data[i] * 255.0));
  return out;
}

// ---- JSON --------------------------------------------------------------------

namespace {

[[noreturn]] void schema(const std::string& field, const std::string& message) {
  fail(ErrorKind::SchemaError, field + ": " + message);
}

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

void reject_unknown(const Json& obj, std::initializer_list<std::string_view> known, const std::string& where, bool strict) {
  if (!strict) return;
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) schema(join(where, key), "unknown field");
  }
}

const Json& require_object(const Json& doc, const std::string& where) {
  if (!doc.is_object()) schema(where.empty() ? "document" : where, "must be a JSON object");
  return doc;
}

double number(const Json& obj, const std::string& key, const std::string& where, std::optional<double> fallback = {}) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (fallback) return *fallback;
    schema(join(where, key), "missing required number");
  }
  if (!it->is_number()) schema(join(where, key), "must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) schema(join(where, key), "must be finite");
  return v;
}

int integer(const Json& obj, const std::string& key, const std::string& where, std::optional<int> fallback = {}) {
  const double v = number(obj, key, where, fallback ? std::optional<double>(*fallback) : std::nullopt);
  if (v != std::floor(v) || std::abs(v) > 1e9) schema(join(where, key), "must be an integer");
  return static_cast<int>(v);
}

std::string text(const Json& obj, const std::string& key, const std::string& where, std::optional<std::string> fallback = {}) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (fallback) return *fallback;
    schema(join(where, key), "missing required string");
  }
  if (!it->is_string()) schema(join(where, key), "must be a string");
  return it->get<std::string>();
}

Eigen::Vector3d vec3(const Json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_array() || it->size() != 3) schema(join(where, key), "must be an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!(*it)[static_cast<std::size_t>(i)].is_number()) schema(join(where, key), "must be an array of 3 numbers");
    v[i] = (*it)[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

constexpr double kDegToRad = kPi / 180.0;

std::size_t distinct_mod_180(std::span<const double> degrees) {
  std::vector<double> reps;
  for (double d : degrees) {
    const double r = d * kDegToRad;
    if (std::none_of(reps.begin(), reps.end(), [&](double q) { return axial_distance(q, r) < 1e-9; })) reps.push_back(r);
  }
  return reps.size();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

Json read_json(const fs::path& path) {
  const Bytes bytes = read_file(path);
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::exception& e) {
    schema(path.filename().string(), std::string("invalid JSON (") + e.what() + ")");
  }
}

void write_json(const Json& doc, const fs::path& path) {
  const std::string s = doc.dump(2) + "\n";
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

Intrinsics parse_intrinsics(const Json& doc, bool strict) {
  require_object(doc, "");
  reject_unknown(doc, {"fx", "fy", "cx", "cy", "skew", "width", "height", "pixel_offset"}, "", strict);
  Intrinsics k;
  k.fx = number(doc, "fx", "");
  k.fy = number(doc, "fy", "");
  k.cx = number(doc, "cx", "");
  k.cy = number(doc, "cy", "");
  k.skew = number(doc, "skew", "", 0.0);
  k.width = integer(doc, "width", "");
  k.height = integer(doc, "height", "");
  k.pixel_offset = number(doc, "pixel_offset", "", 0.0);
  if (k.fx <= 0.0) schema("fx", "must be > 0");
  if (k.fy <= 0.0) schema("fy", "must be > 0");
  if (k.width <= 0) schema("width", "must be > 0");
  if (k.height <= 0) schema("height", "must be > 0");
  if (k.pixel_offset != 0.0 && k.pixel_offset != 0.5) schema("pixel_offset", "must be 0.0 or 0.5");
  return k;
}

Json to_json(const Intrinsics& k) {
  return Json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"skew", k.skew},
              {"width", k.width}, {"height", k.height}, {"pixel_offset", k.pixel_offset}};
}

Intrinsics read_intrinsics(const fs::path& path, bool strict) { return parse_intrinsics(read_json(path), strict); }

MosaicLayout parse_layout(const Json& doc, const std::string& where, bool strict) {
  require_object(doc, where);
  reject_unknown(doc, {"pattern_deg", "row_parity", "col_parity"}, where, strict);
  MosaicLayout layout = MosaicLayout::imx250mzr();
  if (const auto it = doc.find("pattern_deg"); it != doc.end()) {
    const std::string field = join(where, "pattern_deg");
    if (!it->is_array() || it->size() != 2) schema(field, "must be a 2x2 array of angles in degrees");
    for (std::size_t r = 0; r < 2; ++r) {
      const Json& row = (*it)[r];
      if (!row.is_array() || row.size() != 2) schema(field, "must be a 2x2 array of angles in degrees");
      for (std::size_t c = 0; c < 2; ++c) {
        if (!row[c].is_number()) schema(field, "must be a 2x2 array of angles in degrees");
        layout.pattern[r][c] = row[c].get<double>() * kDegToRad;
      }
    }
  }
  layout.row_parity = integer(doc, "row_parity", where, 0);
  layout.col_parity = integer(doc, "col_parity", where, 0);
  if (layout.row_parity != 0 && layout.row_parity != 1) schema(join(where, "row_parity"), "must be 0 or 1");
  if (layout.col_parity != 0 && layout.col_parity != 1) schema(join(where, "col_parity"), "must be 0 or 1");
  try {
    layout.validate();
  } catch (const Error&) {
    schema(join(where, "pattern_deg"), "angles must be distinct mod 180");
  }
  return layout;
}

Json to_json(const MosaicLayout& layout) {
  Json pattern = Json::array();
  for (const auto& row : layout.pattern) pattern.push_back({row[0] / kDegToRad, row[1] / kDegToRad});
  return Json{{"pattern_deg", pattern}, {"row_parity", layout.row_parity}, {"col_parity", layout.col_parity}};
}

Manifest parse_manifest(const Json& doc, const fs::path& base_dir, bool strict) {
  require_object(doc, "");
  reject_unknown(doc, {"kind", "images", "image", "layout", "intrinsics", "saturation"}, "", strict);
  Manifest m;
  const std::string kind = text(doc, "kind", "");
  if (kind == "multishot") {
    m.kind = CaptureKind::Multishot;
    const auto it = doc.find("images");
    if (it == doc.end() || !it->is_array() || it->empty()) schema("images", "must be a non-empty array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = "images[" + std::to_string(i) + "]";
      const Json& entry = require_object((*it)[i], where);
      reject_unknown(entry, {"path", "angle_deg"}, where, strict);
      m.paths.push_back(resolve(base_dir, text(entry, "path", where)));
      m.angles_deg.push_back(number(entry, "angle_deg", where));
    }
    if (distinct_mod_180(m.angles_deg) < 3) schema("angles", "need >= 3 distinct mod 180");
  } else if (kind == "mosaic") {
    m.kind = CaptureKind::Mosaic;
    m.paths.push_back(resolve(base_dir, text(doc, "image", "")));
    if (const auto it = doc.find("layout"); it != doc.end()) m.layout = parse_layout(*it, "layout", strict);
  } else {
    schema("kind", "must be \"multishot\" or \"mosaic\"");
  }
  for (std::size_t i = 0; i < m.paths.size(); ++i) {
    if (!fs::exists(m.paths[i])) {
      schema(m.kind == CaptureKind::Mosaic ? std::string("image") : "images[" + std::to_string(i) + "].path",
             "file not found: " + m.paths[i].string());
    }
  }
  if (const auto it = doc.find("intrinsics"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) schema("intrinsics", "must be a path string");
    m.intrinsics = resolve(base_dir, it->get<std::string>());
    if (!fs::exists(*m.intrinsics)) schema("intrinsics", "file not found: " + m.intrinsics->string());
  }
  if (const auto it = doc.find("saturation"); it != doc.end() && !it->is_null()) {
    if (it->is_string() && it->get<std::string>() == "auto") {
      m.saturation_from_file = true;
    } else if (it->is_number() && it->get<double>() > 0.0) {
      m.saturation = it->get<double>();
    } else {
      schema("saturation", "must be a positive number, \"auto\" or null");
    }
  }
  return m;
}

Manifest read_manifest(const fs::path& path, bool strict) {
  return parse_manifest(read_json(path), path.parent_path(), strict);
}

Json to_json(const Manifest& m, const fs::path& base_dir) {
  auto rel = [&](const fs::path& p) { return fs::relative(p, base_dir).generic_string(); };
  Json doc;
  if (m.kind == CaptureKind::Multishot) {
    doc["kind"] = "multishot";
    doc["images"] = Json::array();
    for (std::size_t i = 0; i < m.paths.size(); ++i) doc["images"].push_back({{"path", rel(m.paths[i])}, {"angle_deg", m.angles_deg[i]}});
  } else {
    doc["kind"] = "mosaic";
    doc["image"] = rel(m.paths.front());
    doc["layout"] = to_json(m.layout);
  }
  if (m.intrinsics) doc["intrinsics"] = rel(*m.intrinsics);
  if (m.saturation_from_file) doc["saturation"] = "auto";
  else if (m.saturation) doc["saturation"] = *m.saturation;
  return doc;
}

RawCapture load_capture(const Manifest& m, const CaptureLoadOptions& options) {
  if (!(options.gamma > 0.0) || !std::isfinite(options.gamma)) schema("gamma", "must be > 0");
  std::vector<Image> images;
  bool float_files = false;
  for (const auto& path : m.paths) {
    RawImage raw = read_raw_image(path);
    float_files = float_files || raw.bit_depth == 64;
    if (options.gamma != 1.0) {
      for (auto& v : raw.pixels.data) v = std::pow(std::max(v, 0.0), options.gamma);
    }
    images.push_back(std::move(raw.pixels));
  }
  std::optional<double> saturation = options.saturation ? options.saturation : m.saturation;
  if (!options.saturation && (options.saturation_from_file || m.saturation_from_file)) saturation = 1.0;
  if (m.kind == CaptureKind::Mosaic) return RawCapture::mosaic(std::move(images.front()), m.layout, saturation);
  std::vector<double> angles;
  for (double d : m.angles_deg) angles.push_back(d * kDegToRad);
  for (const auto& image : images) {
    if (!image.same_shape(images.front().width, images.front().height)) schema("images", "all images must share dimensions");
  }
  (void)float_files;
  return RawCapture::multishot(std::move(images), std::move(angles), saturation);
}

SceneDocument parse_scene(const Json& doc, bool strict) {
  require_object(doc, "");
  reject_unknown(doc, {"geometry", "mode", "model", "s0_base", "noise", "sensor"}, "", strict);
  SceneDocument out;
  const auto git = doc.find("geometry");
  if (git == doc.end()) schema("geometry", "missing required object");
  const Json& g = require_object(*git, "geometry");
  const std::string type = text(g, "type", "geometry");
  if (type == "plane") {
    reject_unknown(g, {"type", "normal", "tilt_deg", "azimuth_deg", "distance"}, "geometry", strict);
    PlaneGeometry plane;
    if (g.contains("normal")) {
      plane.normal = vec3(g, "normal", "geometry");
      if (!(plane.normal.norm() > 0.0)) schema("geometry.normal", "must be non-zero");
      plane.normal.normalize();
    } else {
      const double tilt = number(g, "tilt_deg", "geometry") * kDegToRad;
      const double azimuth = number(g, "azimuth_deg", "geometry", 0.0) * kDegToRad;
      plane.normal = Eigen::Vector3d(std::sin(tilt) * std::cos(azimuth), std::sin(tilt) * std::sin(azimuth), -std::cos(tilt));
    }
    if (!(plane.normal.z() < 0.0)) schema("geometry.normal", "must face the camera (n_z < 0)");
    plane.distance = number(g, "distance", "geometry", 1.0);
    if (plane.distance <= 0.0) schema("geometry.distance", "must be > 0");
    out.scene.geometry = plane;
  } else if (type == "uniform") {
    reject_unknown(g, {"type", "stokes"}, "geometry", strict);
    const auto it = g.find("stokes");
    if (it == g.end() || !it->is_array() || (it->size() != 3 && it->size() != 4)) schema("geometry.stokes", "must be [s0, s1, s2]");
    UniformStokes u;
    for (const auto& v : *it) {
      if (!v.is_number()) schema("geometry.stokes", "must be [s0, s1, s2]");
    }
    u.stokes = {(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>(), 0.0};
    if (!(u.stokes.s0 > 0.0) || !u.stokes.realizable()) schema("geometry.stokes", "must be realizable with s0 > 0");
    out.scene.geometry = u;
  } else {
    schema("geometry.type", "must be \"plane\" or \"uniform\"");
  }
  const std::string mode = text(doc, "mode", "", std::string("specular"));
  if (mode == "specular") out.scene.mode = ReflectionMode::Specular;
  else if (mode == "diffuse") out.scene.mode = ReflectionMode::Diffuse;
  else schema("mode", "must be \"specular\" or \"diffuse\"");
  if (const auto it = doc.find("model"); it != doc.end()) {
    require_object(*it, "model");
    reject_unknown(*it, {"n", "a"}, "model", strict);
    out.scene.model.n = number(*it, "n", "model", 1.5);
    out.scene.model.a = number(*it, "a", "model", 1.0);
  }
  if (out.scene.model.n <= 1.0) schema("model.n", "must be > 1");
  if (out.scene.model.a <= 0.0 || out.scene.model.a > 1.0) schema("model.a", "must be in (0, 1]");
  out.scene.s0_base = number(doc, "s0_base", "", 1.0);
  if (out.scene.s0_base <= 0.0) schema("s0_base", "must be > 0");
  if (const auto it = doc.find("noise"); it != doc.end()) {
    require_object(*it, "noise");
    reject_unknown(*it, {"gaussian_sigma", "quantization_bits", "seed"}, "noise", strict);
    out.noise.gaussian_sigma = number(*it, "gaussian_sigma", "noise", 0.0);
    out.noise.quantization_bits = integer(*it, "quantization_bits", "noise", 0);
    const auto sit = it->find("seed");
    if (sit != it->end()) {
      if (!sit->is_number_integer() || sit->get<long long>() < 0) schema("noise.seed", "must be a non-negative integer");
      out.noise.seed = sit->get<std::uint64_t>();
    }
    if (out.noise.gaussian_sigma < 0.0) schema("noise.gaussian_sigma", "must be >= 0");
    if (out.noise.quantization_bits != 0 && (out.noise.quantization_bits < 8 || out.noise.quantization_bits > 16))
      schema("noise.quantization_bits", "must be 0 or in 8..16");
  }
  if (const auto it = doc.find("sensor"); it != doc.end()) {
    require_object(*it, "sensor");
    reject_unknown(*it, {"kind", "angles_deg", "layout"}, "sensor", strict);
    const std::string kind = text(*it, "kind", "sensor");
    if (kind == "multishot") {
      const auto ait = it->find("angles_deg");
      if (ait == it->end() || !ait->is_array()) schema("sensor.angles_deg", "must be an array of angles in degrees");
      std::vector<double> degrees;
      for (const auto& v : *ait) {
        if (!v.is_number()) schema("sensor.angles_deg", "must be an array of angles in degrees");
        degrees.push_back(v.get<double>());
      }
      if (distinct_mod_180(degrees) < 3) schema("sensor.angles_deg", "need >= 3 distinct mod 180");
      MultishotSensor s;
      for (double d : degrees) s.angles.push_back(d * kDegToRad);
      out.sensor = s;
    } else if (kind == "mosaic") {
      const auto lit = it->find("layout");
      out.sensor = lit == it->end() ? MosaicLayout::imx250mzr() : parse_layout(*lit, "sensor.layout", strict);
    } else {
      schema("sensor.kind", "must be \"multishot\" or \"mosaic\"");
    }
  }
  return out;
}

Json to_json(const SceneDocument& d) {
  Json doc;
  if (const auto* plane = std::get_if<PlaneGeometry>(&d.scene.geometry)) {
    doc["geometry"] = {{"type", "plane"},
                       {"normal", {plane->normal.x(), plane->normal.y(), plane->normal.z()}},
                       {"distance", plane->distance}};
  } else {
    const auto& s = std::get<UniformStokes>(d.scene.geometry).stokes;
    doc["geometry"] = {{"type", "uniform"}, {"stokes", {s.s0, s.s1, s.s2}}};
  }
  doc["mode"] = d.scene.mode == ReflectionMode::Specular ? "specular" : "diffuse";
  doc["model"] = {{"n", d.scene.model.n}, {"a", d.scene.model.a}};
  doc["s0_base"] = d.scene.s0_base;
  doc["noise"] = {{"gaussian_sigma", d.noise.gaussian_sigma},
                  {"quantization_bits", d.noise.quantization_bits},
                  {"seed", d.noise.seed}};
  if (const auto* layout = std::get_if<MosaicLayout>(&d.sensor)) {
    doc["sensor"] = {{"kind", "mosaic"}, {"layout", to_json(*layout)}};
  } else {
    Json angles = Json::array();
    for (double a : std::get<MultishotSensor>(d.sensor).angles) angles.push_back(a / kDegToRad);
    doc["sensor"] = {{"kind", "multishot"}, {"angles_deg", angles}};
  }
  return doc;
}

Json to_json(const ErrorStats& stats) {
  return Json{{"mae_deg", stats.mae_deg}, {"rmse_deg", stats.rmse_deg}, {"std_deg", stats.std_deg}, {"count", stats.count}};
}

Json plane_report(const PlaneEstimate& plane, const std::optional<ErrorStats>& error) {
  Json doc{{"normal", {plane.normal.x(), plane.normal.y(), plane.normal.z()}},
           {"residual", plane.residual},
           {"count", plane.count}};
  if (error) {
    doc["mae_deg"] = error->mae_deg;
    doc["rmse_deg"] = error->rmse_deg;
    doc["std_deg"] = error->std_deg;
  } else {
    doc["mae_deg"] = nullptr;
    doc["rmse_deg"] = nullptr;
    doc["std_deg"] = nullptr;
  }
  return doc;
}

}  // namespace polarproj::io
