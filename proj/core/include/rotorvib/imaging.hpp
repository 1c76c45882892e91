#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "rotorvib/matrix.hpp"

namespace rotorvib {

/// 256-entry RGB lookup table; luminance is strictly increasing across
/// entries so brighter pixels always mean larger magnitudes.
struct ColorMap {
  std::array<std::array<std::uint8_t, 3>, 256> table{};
};

double luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// The table shipped as core/assets/colormap256.bin; built procedurally so
/// the asset can be regenerated and pinned by tests.
const ColorMap& default_colormap();

ColorMap load_colormap(const std::filesystem::path& path);
void save_colormap(const ColorMap& cmap, const std::filesystem::path& path);

struct ImageRGB {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;  // height * width * 3, row-major RGB

  std::uint8_t& at(int y, int x, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  std::uint8_t at(int y, int x, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
};

inline constexpr int kCanvasWidth = 432;
inline constexpr int kCanvasHeight = 288;
inline constexpr int kDefaultInputSide = 298;

/// Per-matrix dB normalization: D = 20*log10(max(S, 1e-10)) mapped to [0,1]
/// over [D_max - range_db, D_max]. Constant matrices (e.g. silence) map to
/// all zeros so they render black.
Matrix to_db_normalized(const Matrix& s, double range_db);

/// Bilinear rendering of a [0,1] grid onto a canvas. Row 0 of the matrix is
/// the lowest frequency/cepstral index and lands at the bottom of the image;
/// columns are time frames, left to right.
ImageRGB render(const Matrix& m01, const ColorMap& cmap,
                int width = kCanvasWidth, int height = kCanvasHeight);

/// Corner-aligned, channel-independent bilinear resize.
ImageRGB resize_bilinear(const ImageRGB& img, int out_width, int out_height);

/// Channel-major float packing of a square image, values byte/255.
struct InputTensor {
  int side = 0;
  std::vector<float> values;  // 3 * side * side
};

InputTensor to_input_tensor(const ImageRGB& img);
ImageRGB from_input_tensor(const InputTensor& t);

/// Binary PPM (P6, maxval 255).
void write_ppm(const ImageRGB& img, const std::filesystem::path& path);
ImageRGB read_ppm(const std::filesystem::path& path);
ImageRGB decode_ppm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_ppm(const ImageRGB& img);

}  // namespace rotorvib
