#pragma once

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "frdd/field.hpp"

namespace frdd {

/// Two carriers: PFM (grayscale portable float map, lossless for values
/// representable as 32-bit floats) and 16-bit PGM with a declared depth
/// range in a header comment (linear quantization). PFM is the default.
enum class DepthFormat { pfm, pgm16 };

namespace detail {

inline void put_u16_be(std::ostream& os, std::uint16_t v) {
  const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
  os.write(bytes, 2);
}

inline std::uint16_t get_u16_be(std::istream& is) {
  unsigned char bytes[2];
  is.read(reinterpret_cast<char*>(bytes), 2);
  if (!is) throw std::runtime_error("truncated 16-bit sample data");
  return static_cast<std::uint16_t>((bytes[0] << 8) | bytes[1]);
}

inline void put_f32(std::ostream& os, float v, bool little_endian) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  char bytes[4];
  for (int i = 0; i < 4; ++i) {
    const int shift = little_endian ? 8 * i : 8 * (3 - i);
    bytes[i] = static_cast<char>((bits >> shift) & 0xff);
  }
  os.write(bytes, 4);
}

inline float get_f32(std::istream& is, bool little_endian) {
  unsigned char bytes[4];
  is.read(reinterpret_cast<char*>(bytes), 4);
  if (!is) throw std::runtime_error("truncated float sample data");
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) {
    const int shift = little_endian ? 8 * i : 8 * (3 - i);
    bits |= static_cast<std::uint32_t>(bytes[i]) << shift;
  }
  return std::bit_cast<float>(bits);
}

/// PNM header token reader: skips whitespace and '#' comments, collecting
/// comment lines for headers that carry metadata in them.
inline std::string next_pnm_token(std::istream& is, std::vector<std::string>* comments) {
  for (;;) {
    int c = is.peek();
    if (c == EOF) throw std::runtime_error("truncated header");
    if (std::isspace(c)) {
      is.get();
      continue;
    }
    if (c == '#') {
      is.get();  // the comment text is stored without its '#' marker
      std::string line;
      std::getline(is, line);
      if (comments) comments->push_back(line);
      continue;
    }
    break;
  }
  std::string token;
  while (is.peek() != EOF && !std::isspace(is.peek()))
    token.push_back(static_cast<char>(is.get()));
  return token;
}

/// Shortest exact decimal form: the reader recovers the identical double,
/// so quantization and dequantization share one range. Locale-free.
inline std::string exact_decimal(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline int parse_dim(const std::string& token, const char* what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(token, &pos);
    if (pos != token.size() || v < 1) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("invalid ") + what + " in header");
  }
}

}  // namespace detail

/// Grayscale PFM: "Pf", width height, scale -1.0 (little-endian 32-bit
/// floats), rows bottom to top. Values pass through a float32 cast, so
/// the round trip is exact for float32-representable data.
inline void write_pfm(std::ostream& os, const DepthField& field) {
  os << "Pf\n" << field.width() << " " << field.height() << "\n-1.0\n";
  for (int y = field.height() - 1; y >= 0; --y)
    for (int x = 0; x < field.width(); ++x)
      detail::put_f32(os, static_cast<float>(field(x, y)), true);
  if (!os) throw std::runtime_error("failed writing PFM data");
}

inline DepthField read_pfm(std::istream& is) {
  const std::string magic = detail::next_pnm_token(is, nullptr);
  if (magic == "PF") throw std::runtime_error("color PFM is not supported");
  if (magic != "Pf") throw std::runtime_error("not a grayscale PFM file");
  const int w = detail::parse_dim(detail::next_pnm_token(is, nullptr), "width");
  const int h = detail::parse_dim(detail::next_pnm_token(is, nullptr), "height");
  const std::string scale_token = detail::next_pnm_token(is, nullptr);
  double scale = 0.0;
  try {
    scale = std::stod(scale_token);
  } catch (const std::exception&) {
    throw std::runtime_error("invalid scale in PFM header");
  }
  if (scale == 0.0) throw std::runtime_error("invalid scale in PFM header");
  is.get();  // single whitespace between header and samples
  const bool little_endian = scale < 0.0;
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (int y = h - 1; y >= 0; --y)
    for (int x = 0; x < w; ++x)
      v[static_cast<std::size_t>(y) * w + x] = detail::get_f32(is, little_endian);
  return DepthField(w, h, std::move(v));
}

/// 16-bit PGM: "P5", maxval 65535, big-endian samples, rows top to
/// bottom, values quantized linearly over a depth range declared in a
/// "# depth_range_mm <min> <max>" header comment. Out-of-range values
/// saturate; the round trip is exact to one quantization step.
inline void write_pgm16(std::ostream& os, const DepthField& field, double range_min,
                        double range_max) {
  if (!std::isfinite(range_min) || !std::isfinite(range_max) || range_max < range_min)
    throw std::invalid_argument("write_pgm16: invalid depth range");
  os << "P5\n# depth_range_mm " << detail::exact_decimal(range_min) << " "
     << detail::exact_decimal(range_max) << "\n"
     << field.width() << " " << field.height() << "\n65535\n";
  const double span = range_max - range_min;
  for (int y = 0; y < field.height(); ++y)
    for (int x = 0; x < field.width(); ++x) {
      long q = 0;
      if (span > 0.0)
        q = std::lround((field(x, y) - range_min) / span * 65535.0);
      if (q < 0) q = 0;
      if (q > 65535) q = 65535;
      detail::put_u16_be(os, static_cast<std::uint16_t>(q));
    }
  if (!os) throw std::runtime_error("failed writing PGM data");
}

inline void write_pgm16(std::ostream& os, const DepthField& field) {
  write_pgm16(os, field, field.min_value(), field.max_value());
}

inline DepthField read_pgm16(std::istream& is) {
  std::vector<std::string> comments;
  const std::string magic = detail::next_pnm_token(is, &comments);
  if (magic != "P5") throw std::runtime_error("not a binary PGM file");
  const int w = detail::parse_dim(detail::next_pnm_token(is, &comments), "width");
  const int h = detail::parse_dim(detail::next_pnm_token(is, &comments), "height");
  const std::string maxval = detail::next_pnm_token(is, &comments);
  if (maxval != "65535")
    throw std::runtime_error("unsupported PGM maxval (expected 65535)");
  is.get();  // single whitespace between header and samples

  double range_min = 0.0;
  double range_max = 0.0;
  bool have_range = false;
  for (const std::string& comment : comments) {
    std::istringstream ss(comment);
    std::string key;
    if (ss >> key && key == "depth_range_mm" && (ss >> range_min >> range_max)) {
      have_range = true;
      break;
    }
  }
  if (!have_range)
    throw std::runtime_error("missing depth_range_mm comment in PGM header");
  if (!std::isfinite(range_min) || !std::isfinite(range_max) || range_max < range_min)
    throw std::runtime_error("invalid depth_range_mm comment in PGM header");

  const double span = range_max - range_min;
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = range_min + detail::get_u16_be(is) / 65535.0 * span;
  return DepthField(w, h, std::move(v));
}

/// Extension dispatch for writing: ".pgm" selects the 16-bit format,
/// anything else the PFM default.
inline DepthFormat format_for_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return DepthFormat::pfm;
  std::string ext = path.substr(dot);
  for (char& c : ext) c = static_cast<char>(std::tolower(c));
  return ext == ".pgm" ? DepthFormat::pgm16 : DepthFormat::pfm;
}

/// Reads either supported format, dispatching on the magic bytes. The
/// detected format is reported through out_format when non-null so
/// writers can mirror it.
inline DepthField read_depth(const std::string& path, DepthFormat* out_format = nullptr) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  const int first = is.peek();
  DepthFormat format = DepthFormat::pfm;
  if (first == 'P') {
    char magic[2] = {static_cast<char>(is.get()), static_cast<char>(is.peek())};
    is.unget();
    format = (magic[1] == 'f' || magic[1] == 'F') ? DepthFormat::pfm : DepthFormat::pgm16;
  }
  if (out_format) *out_format = format;
  try {
    return format == DepthFormat::pfm ? read_pfm(is) : read_pgm16(is);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

inline void write_depth(const std::string& path, const DepthField& field,
                        DepthFormat format) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  if (format == DepthFormat::pfm)
    write_pfm(os, field);
  else
    write_pgm16(os, field);
  os.flush();
  if (!os) throw std::runtime_error("failed writing " + path);
}

inline void write_depth(const std::string& path, const DepthField& field) {
  write_depth(path, field, format_for_path(path));
}

}  // namespace frdd
