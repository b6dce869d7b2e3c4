#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "specoarse/sparse.hpp"

namespace specoarse {

/// Gray levels lround(255 · min(|C_ij| / s, 1)) with s = max|diag C|, row
/// major. All zero when s is 0.
std::vector<std::uint8_t> heatmap_pixels(const DenseMatrix& C);

/// 8-bit grayscale PNG, one pixel per entry, deterministic bytes.
std::vector<std::uint8_t> encode_gray_png(const std::vector<std::uint8_t>& pixels, Index width, Index height);

void render_heatmap(const DenseMatrix& C, const std::filesystem::path& path);

}  // namespace specoarse
