#include "rotorvib/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rotorvib/io.hpp"

namespace rotorvib {

namespace {

constexpr double kDbFloor = 1e-10;

std::uint8_t to_byte01(double v) {
  const long b = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
  return static_cast<std::uint8_t>(b);
}

/// Samples m at fractional (row, col) with bilinear weights.
double sample_bilinear(const Matrix& m, double row, double col) {
  const int r0 = static_cast<int>(row);
  const int c0 = static_cast<int>(col);
  const int r1 = std::min(r0 + 1, m.rows - 1);
  const int c1 = std::min(c0 + 1, m.cols - 1);
  const double fr = row - r0;
  const double fc = col - c0;
  return (1.0 - fr) * ((1.0 - fc) * m.at(r0, c0) + fc * m.at(r0, c1)) +
         fr * ((1.0 - fc) * m.at(r1, c0) + fc * m.at(r1, c1));
}

}  // namespace

Matrix to_db_normalized(const Matrix& s, double range_db) {
  if (s.empty()) throw std::invalid_argument("to_db_normalized: empty matrix");
  if (!(range_db > 0.0)) {
    throw std::invalid_argument("to_db_normalized: range_db must be positive");
  }
  Matrix db(s.rows, s.cols);
  double d_max = -1e300;
  double d_min = 1e300;
  for (std::size_t i = 0; i < s.data.size(); ++i) {
    const double d = 20.0 * std::log10(std::max(s.data[i], kDbFloor));
    db.data[i] = d;
    d_max = std::max(d_max, d);
    d_min = std::min(d_min, d);
  }
  if (d_max == d_min) {
    // Constant input (e.g. silence) renders black.
    std::fill(db.data.begin(), db.data.end(), 0.0);
    return db;
  }
  const double lo = d_max - range_db;
  for (double& v : db.data) v = std::clamp((v - lo) / range_db, 0.0, 1.0);
  return db;
}

ImageRGB render(const Matrix& m01, const ColorMap& cmap, int width, int height) {
  if (m01.empty()) throw std::invalid_argument("render: empty matrix");
  if (width < 1 || height < 1) {
    throw std::invalid_argument("render: canvas dimensions must be positive");
  }
  ImageRGB img;
  img.width = width;
  img.height = height;
  img.pixels.resize(static_cast<std::size_t>(width) * height * 3);
  const double row_scale =
      height > 1 ? static_cast<double>(m01.rows - 1) / (height - 1) : 0.0;
  const double col_scale =
      width > 1 ? static_cast<double>(m01.cols - 1) / (width - 1) : 0.0;
  for (int py = 0; py < height; ++py) {
    // Row 0 of the matrix is the lowest bin and sits at the bottom.
    const double src_row = (height - 1 - py) * row_scale;
    for (int px = 0; px < width; ++px) {
      const double v = sample_bilinear(m01, src_row, px * col_scale);
      const auto& rgb = cmap.table[to_byte01(v)];
      img.at(py, px, 0) = rgb[0];
      img.at(py, px, 1) = rgb[1];
      img.at(py, px, 2) = rgb[2];
    }
  }
  return img;
}

ImageRGB resize_bilinear(const ImageRGB& img, int out_width, int out_height) {
  if (img.width < 1 || img.height < 1) {
    throw std::invalid_argument("resize: empty image");
  }
  if (out_width < 1 || out_height < 1) {
    throw std::invalid_argument("resize: output dimensions must be positive");
  }
  ImageRGB out;
  out.width = out_width;
  out.height = out_height;
  out.pixels.resize(static_cast<std::size_t>(out_width) * out_height * 3);
  const double row_scale =
      out_height > 1 ? static_cast<double>(img.height - 1) / (out_height - 1)
                     : 0.0;
  const double col_scale =
      out_width > 1 ? static_cast<double>(img.width - 1) / (out_width - 1)
                    : 0.0;
  for (int py = 0; py < out_height; ++py) {
    const double sy = py * row_scale;
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fy = sy - y0;
    for (int px = 0; px < out_width; ++px) {
      const double sx = px * col_scale;
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double fx = sx - x0;
      for (int c = 0; c < 3; ++c) {
        const double v =
            (1.0 - fy) * ((1.0 - fx) * img.at(y0, x0, c) + fx * img.at(y0, x1, c)) +
            fy * ((1.0 - fx) * img.at(y1, x0, c) + fx * img.at(y1, x1, c));
        out.at(py, px, c) = static_cast<std::uint8_t>(
            std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
  }
  return out;
}

InputTensor to_input_tensor(const ImageRGB& img) {
  if (img.width != img.height || img.width < 1) {
    throw std::invalid_argument("to_input_tensor: image must be square");
  }
  InputTensor t;
  t.side = img.width;
  const int s = t.side;
  t.values.resize(3 * static_cast<std::size_t>(s) * s);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < s; ++y) {
      for (int x = 0; x < s; ++x) {
        t.values[(static_cast<std::size_t>(c) * s + y) * s + x] =
            static_cast<float>(img.at(y, x, c)) / 255.0f;
      }
    }
  }
  return t;
}

ImageRGB from_input_tensor(const InputTensor& t) {
  ImageRGB img;
  img.width = img.height = t.side;
  const int s = t.side;
  img.pixels.resize(3 * static_cast<std::size_t>(s) * s);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < s; ++y) {
      for (int x = 0; x < s; ++x) {
        const float v = t.values[(static_cast<std::size_t>(c) * s + y) * s + x];
        img.at(y, x, c) = static_cast<std::uint8_t>(
            std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
      }
    }
  }
  return img;
}

std::vector<std::uint8_t> encode_ppm(const ImageRGB& img) {
  if (img.width < 1 || img.height < 1) {
    throw std::invalid_argument("encode_ppm: empty image");
  }
  std::string header = "P6\n" + std::to_string(img.width) + " " +
                       std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> bytes;
  bytes.reserve(header.size() + img.pixels.size());
  bytes.insert(bytes.end(), header.begin(), header.end());
  bytes.insert(bytes.end(), img.pixels.begin(), img.pixels.end());
  return bytes;
}

ImageRGB decode_ppm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (std::isspace(bytes[pos])) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  };
  auto read_token = [&]() -> std::string {
    skip_space();
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) {
      tok.push_back(static_cast<char>(bytes[pos++]));
    }
    return tok;
  };
  if (read_token() != "P6") throw std::runtime_error("not a P6 ppm");
  const int width = std::stoi(read_token());
  const int height = std::stoi(read_token());
  const int maxval = std::stoi(read_token());
  if (width < 1 || height < 1 || maxval != 255) {
    throw std::runtime_error("unsupported ppm geometry or maxval");
  }
  ++pos;  // single whitespace after maxval
  const std::size_t need = static_cast<std::size_t>(width) * height * 3;
  if (bytes.size() - pos != need) {
    throw std::runtime_error("ppm payload size mismatch");
  }
  ImageRGB img;
  img.width = width;
  img.height = height;
  img.pixels.assign(bytes.begin() + pos, bytes.end());
  return img;
}

void write_ppm(const ImageRGB& img, const std::filesystem::path& path) {
  write_bytes(path, encode_ppm(img));
}

ImageRGB read_ppm(const std::filesystem::path& path) {
  return decode_ppm(read_bytes(path));
}

}  // namespace rotorvib
