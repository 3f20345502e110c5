#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "frdd/io.hpp"
#include "test_util.hpp"

using frdd::DepthField;
using frdd::DepthFormat;

namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("frdd_io_test_" + name);
}

float le_float_at(const std::string& bytes, std::size_t offset) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i)
    bits |= static_cast<std::uint32_t>(
                static_cast<unsigned char>(bytes[offset + i]))
            << (8 * i);
  return std::bit_cast<float>(bits);
}

void append_le_float(std::string& bytes, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i)
    bytes.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

}  // namespace

TEST_CASE("pfm round trip is lossless for float32-representable data") {
  const DepthField raw = testutil::random_field(9, 7, 400, 1600, 83);
  std::vector<double> narrowed(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    narrowed[i] = static_cast<double>(static_cast<float>(raw[i]));
  const DepthField field(9, 7, std::move(narrowed));

  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  frdd::write_pfm(ss, field);
  CHECK(frdd::read_pfm(ss) == field);
}

TEST_CASE("pfm byte layout: header, little-endian samples, bottom row first") {
  const DepthField field(2, 2, std::vector<double>{1.5, 2.5, 3.5, 4.5});
  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  frdd::write_pfm(ss, field);
  const std::string bytes = ss.str();

  const std::string header = "Pf\n2 2\n-1.0\n";
  REQUIRE(bytes.size() == header.size() + 16);
  CHECK(bytes.substr(0, header.size()) == header);
  // Bottom row (3.5, 4.5) is stored first.
  CHECK(le_float_at(bytes, header.size()) == 3.5f);
  CHECK(le_float_at(bytes, header.size() + 4) == 4.5f);
  CHECK(le_float_at(bytes, header.size() + 8) == 1.5f);
  CHECK(le_float_at(bytes, header.size() + 12) == 2.5f);
}

TEST_CASE("pfm reader honors a positive (big-endian) scale") {
  std::string bytes = "Pf\n2 2\n1.0\n";
  const float samples[4] = {3.0f, 4.0f, 1.0f, 2.0f};  // bottom row first
  for (float s : samples) {
    const auto bits = std::bit_cast<std::uint32_t>(s);
    for (int i = 3; i >= 0; --i)
      bytes.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  std::istringstream is(bytes, std::ios::binary);
  CHECK(frdd::read_pfm(is) == DepthField(2, 2, std::vector<double>{1, 2, 3, 4}));
}

TEST_CASE("pfm reader rejects malformed input") {
  const auto read_string = [](std::string s) {
    std::istringstream is(std::move(s), std::ios::binary);
    return frdd::read_pfm(is);
  };
  CHECK_THROWS_AS(read_string("PF\n2 2\n-1.0\n"), std::runtime_error);  // color
  CHECK_THROWS_AS(read_string("P5\n2 2\n-1.0\n"), std::runtime_error);
  CHECK_THROWS_AS(read_string("Pf\n2 x\n-1.0\n"), std::runtime_error);
  CHECK_THROWS_AS(read_string("Pf\n2 2\n0.0\n"), std::runtime_error);
  CHECK_THROWS_AS(read_string("Pf\n2 2\n-1.0\nxx"), std::runtime_error);  // truncated

  std::string nan_bytes = "Pf\n2 2\n-1.0\n";
  append_le_float(nan_bytes, 1.0f);
  append_le_float(nan_bytes, std::numeric_limits<float>::quiet_NaN());
  append_le_float(nan_bytes, 3.0f);
  append_le_float(nan_bytes, 4.0f);
  CHECK_THROWS_AS(read_string(nan_bytes), frdd::numeric_error);
}

TEST_CASE("pgm16 round trip stays within one quantization step") {
  const DepthField field = testutil::random_field(16, 12, 500, 1500, 89);
  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  frdd::write_pgm16(ss, field);
  const DepthField back = frdd::read_pgm16(ss);
  REQUIRE(back.same_shape(field));
  const double step = field.dynamic_range() / 65535.0;
  for (std::size_t i = 0; i < field.size(); ++i)
    CHECK(std::abs(back[i] - field[i]) <= step);
}

TEST_CASE("pgm16 header declares the range; constants survive exactly") {
  const DepthField field(3, 2, 1000.0);
  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  frdd::write_pgm16(ss, field, 500.0, 1500.0);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, bytes.find('\n', 3) + 1) == "P5\n# depth_range_mm 500 1500\n");

  std::istringstream is(bytes, std::ios::binary);
  const DepthField back = frdd::read_pgm16(is);
  // 1000 sits exactly mid-range but not on the 65535 grid; allow one step.
  for (std::size_t i = 0; i < back.size(); ++i)
    CHECK(std::abs(back[i] - 1000.0) <= 1000.0 / 65535.0);

  // Degenerate declared range (constant field, derived range) is exact.
  std::stringstream ss2(std::ios::in | std::ios::out | std::ios::binary);
  frdd::write_pgm16(ss2, field);
  CHECK(frdd::read_pgm16(ss2) == field);
}

TEST_CASE("pgm16 saturates values outside the declared range") {
  const DepthField field(2, 2, std::vector<double>{-50.0, 0.0, 100.0, 150.0});
  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  frdd::write_pgm16(ss, field, 0.0, 100.0);
  const DepthField back = frdd::read_pgm16(ss);
  CHECK(back[0] == 0.0);
  CHECK(back[1] == 0.0);
  CHECK(back[2] == 100.0);
  CHECK(back[3] == 100.0);
}

TEST_CASE("pgm16 reader rejects malformed input") {
  const auto read_string = [](std::string s) {
    std::istringstream is(std::move(s), std::ios::binary);
    return frdd::read_pgm16(is);
  };
  CHECK_THROWS_AS(read_string("P6\n2 2\n65535\n"), std::runtime_error);
  // 8-bit maxval is not a depth carrier here.
  CHECK_THROWS_AS(read_string("P5\n# depth_range_mm 0 1\n2 2\n255\n"),
                  std::runtime_error);
  // No depth_range_mm comment.
  CHECK_THROWS_AS(read_string(std::string("P5\n2 2\n65535\n") + std::string(8, '\0')),
                  std::runtime_error);
  // Range inverted.
  CHECK_THROWS_AS(
      read_string(std::string("P5\n# depth_range_mm 9 1\n2 2\n65535\n") +
                  std::string(8, '\0')),
      std::runtime_error);
  // Truncated samples.
  CHECK_THROWS_AS(read_string("P5\n# depth_range_mm 0 1\n2 2\n65535\n\x01"),
                  std::runtime_error);

  std::stringstream sink(std::ios::in | std::ios::out | std::ios::binary);
  CHECK_THROWS_AS(frdd::write_pgm16(sink, DepthField(2, 2, 1.0), 5.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("path-level io dispatches on extension and magic") {
  CHECK(frdd::format_for_path("a/b/depth.pfm") == DepthFormat::pfm);
  CHECK(frdd::format_for_path("a/b/depth.PGM") == DepthFormat::pgm16);
  CHECK(frdd::format_for_path("a/b/depth.pgm") == DepthFormat::pgm16);
  CHECK(frdd::format_for_path("no_extension") == DepthFormat::pfm);
  CHECK(frdd::format_for_path("weird.bin") == DepthFormat::pfm);

  const DepthField field = testutil::random_field(5, 4, 600, 1400, 97);
  const fs::path pfm_path = temp_file("roundtrip.pfm");
  const fs::path pgm_path = temp_file("roundtrip.pgm");
  frdd::write_depth(pfm_path.string(), field);
  frdd::write_depth(pgm_path.string(), field);

  DepthFormat detected = DepthFormat::pgm16;
  const DepthField from_pfm = frdd::read_depth(pfm_path.string(), &detected);
  CHECK(detected == DepthFormat::pfm);
  for (std::size_t i = 0; i < field.size(); ++i)
    CHECK(from_pfm[i] == static_cast<double>(static_cast<float>(field[i])));

  const DepthField from_pgm = frdd::read_depth(pgm_path.string(), &detected);
  CHECK(detected == DepthFormat::pgm16);
  const double step = field.dynamic_range() / 65535.0;
  for (std::size_t i = 0; i < field.size(); ++i)
    CHECK(std::abs(from_pgm[i] - field[i]) <= step);

  fs::remove(pfm_path);
  fs::remove(pgm_path);
}

TEST_CASE("path-level io reports failures with the offending path") {
  const std::string missing = temp_file("does_not_exist.pfm").string();
  CHECK_THROWS_WITH(frdd::read_depth(missing),
                    Catch::Matchers::ContainsSubstring("cannot open"));

  const fs::path garbage = temp_file("garbage.pfm");
  {
    std::ofstream os(garbage, std::ios::binary);
    os << "hello world";
  }
  CHECK_THROWS_WITH(frdd::read_depth(garbage.string()),
                    Catch::Matchers::ContainsSubstring(garbage.string()));
  fs::remove(garbage);
}
