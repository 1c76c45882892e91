#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rotorvib/imaging.hpp"
#include "rotorvib/io.hpp"

namespace rotorvib {

double luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

namespace {

struct Anchor {
  double pos;  // in [0, 1]
  double r, g, b;
};

// Dark-to-bright heat ramp. The hues are a free choice; only the strictly
// increasing luminance matters to the pipeline.
constexpr Anchor kAnchors[] = {
    {0.00, 0, 0, 4},     {0.15, 40, 11, 84},   {0.30, 101, 21, 110},
    {0.45, 159, 42, 99}, {0.60, 212, 72, 66},  {0.75, 245, 125, 21},
    {0.90, 250, 193, 39}, {1.00, 252, 255, 164}};

ColorMap build_default() {
  ColorMap cmap;
  double prev_lum = -1.0;
  for (int i = 0; i < 256; ++i) {
    const double t = i / 255.0;
    std::size_t seg = 0;
    while (seg + 2 < std::size(kAnchors) && kAnchors[seg + 1].pos <= t) ++seg;
    const Anchor& a = kAnchors[seg];
    const Anchor& b = kAnchors[seg + 1];
    const double f = (t - a.pos) / (b.pos - a.pos);
    int r = static_cast<int>(std::lround(a.r + f * (b.r - a.r)));
    int g = static_cast<int>(std::lround(a.g + f * (b.g - a.g)));
    int bl = static_cast<int>(std::lround(a.b + f * (b.b - a.b)));
    // Nudge the entry brighter until luminance strictly exceeds the
    // previous one (rounding can flatten small slopes).
    auto lum = [&] {
      return luminance(static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                       static_cast<std::uint8_t>(bl));
    };
    while (lum() <= prev_lum) {
      if (bl < 255) ++bl;
      else if (g < 255) ++g;
      else if (r < 255) ++r;
      else throw std::logic_error("colormap luminance fix-up saturated");
    }
    prev_lum = lum();
    cmap.table[i] = {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                     static_cast<std::uint8_t>(bl)};
  }
  return cmap;
}

}  // namespace

const ColorMap& default_colormap() {
  static const ColorMap cmap = build_default();
  return cmap;
}

ColorMap load_colormap(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() != 768) {
    throw std::runtime_error("colormap file must be exactly 768 bytes: " +
                             path.string());
  }
  ColorMap cmap;
  for (int i = 0; i < 256; ++i) {
    cmap.table[i] = {bytes[3 * i], bytes[3 * i + 1], bytes[3 * i + 2]};
  }
  return cmap;
}

void save_colormap(const ColorMap& cmap, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(768);
  for (int i = 0; i < 256; ++i) {
    bytes[3 * i] = cmap.table[i][0];
    bytes[3 * i + 1] = cmap.table[i][1];
    bytes[3 * i + 2] = cmap.table[i][2];
  }
  write_bytes(path, bytes);
}

}  // namespace rotorvib
