#include "specoarse/png.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <zlib.h>

#include "specoarse/error.hpp"

namespace specoarse {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4], const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::vector<std::uint8_t> heatmap_pixels(const DenseMatrix& C) {
  if (!C.allFinite()) throw InputError("heatmap requires finite entries");
  const Index d = std::min(C.rows(), C.cols());
  const double s = d > 0 ? C.diagonal().cwiseAbs().maxCoeff() : 0.0;
  std::vector<std::uint8_t> px(static_cast<std::size_t>(C.rows() * C.cols()), 0);
  if (s == 0.0) return px;
  for (Index i = 0; i < C.rows(); ++i) {
    for (Index j = 0; j < C.cols(); ++j) {
      const double v = std::min(std::abs(C(i, j)) / s, 1.0);
      px[static_cast<std::size_t>(i * C.cols() + j)] = static_cast<std::uint8_t>(std::lround(255.0 * v));
    }
  }
  return px;
}

std::vector<std::uint8_t> encode_gray_png(const std::vector<std::uint8_t>& pixels, Index width, Index height) {
  if (width <= 0 || height <= 0 || pixels.size() != static_cast<std::size_t>(width * height)) {
    throw InputError("png: pixel buffer does not match the image size");
  }
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>((width + 1) * height));
  for (Index y = 0; y < height; ++y) {
    raw.push_back(0);  // filter: none
    raw.insert(raw.end(), pixels.begin() + y * width, pixels.begin() + (y + 1) * width);
  }
  uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> packed(packed_size);
  if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK) {
    throw NumericalError("png: zlib compression failed");
  }
  packed.resize(packed_size);

  std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(width));
  put_u32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});  // 8-bit gray, deflate, no filter, no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", packed);
  put_chunk(out, "IEND", {});
  return out;
}

void render_heatmap(const DenseMatrix& C, const std::filesystem::path& path) {
  const auto bytes = encode_gray_png(heatmap_pixels(C), C.cols(), C.rows());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace specoarse
