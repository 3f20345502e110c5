#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "frdd/field.hpp"
#include "frdd/metrics.hpp"
#include "test_util.hpp"

using frdd::DepthField;
using testutil::random_field;
using testutil::random_int_field;

TEST_CASE("DepthField enforces shape and data invariants") {
  CHECK_THROWS_AS(DepthField(1, 4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(DepthField(4, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(DepthField(2, 2, std::vector<double>{1, 2, 3}), std::invalid_argument);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(DepthField(2, 2, std::vector<double>{1, 2, 3, nan}), frdd::numeric_error);
  CHECK_THROWS_AS(DepthField(2, 2, std::vector<double>{1, 2, inf, 4}), frdd::numeric_error);
  CHECK_THROWS_AS(DepthField(2, 2, 1.0 / 0.0), frdd::numeric_error);

  CHECK_THROWS_AS(DepthField(2, 2, std::vector<double>{1, 2, 3, 4},
                             std::vector<std::uint8_t>{1, 1, 1}),
                  std::invalid_argument);

  const DepthField f(3, 2, std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(f.width() == 3);
  CHECK(f.height() == 2);
  CHECK(f.size() == 6);
  CHECK(f(0, 0) == 1.0);
  CHECK(f(2, 1) == 6.0);
  CHECK(f.min_value() == 1.0);
  CHECK(f.max_value() == 6.0);
  CHECK(f.dynamic_range() == 5.0);
  CHECK(f.mean() == Catch::Approx(3.5).epsilon(1e-15));
  CHECK_FALSE(f.has_mask());
}

TEST_CASE("clamped indexing replicates the nearest edge pixel") {
  const DepthField f = random_int_field(5, 4, -9, 9, 101);
  for (int y = -3; y < 7; ++y)
    for (int x = -3; x < 8; ++x) {
      const int cx = std::clamp(x, 0, f.width() - 1);
      const int cy = std::clamp(y, 0, f.height() - 1);
      CHECK(f.clamped(x, y) == f(cx, cy));
    }
}

TEST_CASE("pad_neumann replicates the 2x2 example") {
  const DepthField f(2, 2, std::vector<double>{1, 2, 3, 4});
  const DepthField p = frdd::pad_neumann(f, 1);
  REQUIRE(p.width() == 4);
  REQUIRE(p.height() == 4);
  const std::vector<double> expected{1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4};
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(p[i] == expected[i]);
}

TEST_CASE("pad_neumann keeps constants constant") {
  const DepthField f(3, 3, 7.5);
  for (int margin : {1, 2, 5}) {
    const DepthField p = frdd::pad_neumann(f, margin);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == 7.5);
  }
}

TEST_CASE("pad_neumann matches the index-clamp oracle") {
  const DepthField ramp(3, 3, std::vector<double>{0, 1, 2, 1, 2, 3, 2, 3, 4});
  for (const DepthField& f : {ramp, random_field(6, 5, -10, 10, 7)}) {
    for (int margin : {1, 2, 3}) {
      const DepthField p = frdd::pad_neumann(f, margin);
      REQUIRE(p.width() == f.width() + 2 * margin);
      REQUIRE(p.height() == f.height() + 2 * margin);
      for (int y = 0; y < p.height(); ++y)
        for (int x = 0; x < p.width(); ++x)
          CHECK(p(x, y) == f.clamped(x - margin, y - margin));
    }
  }
  CHECK_THROWS_AS(frdd::pad_neumann(ramp, 0), std::invalid_argument);
}

TEST_CASE("pad then interior crop is the identity") {
  const DepthField f = random_field(7, 4, 100, 2000, 21);
  for (int margin : {1, 3}) {
    const DepthField p = frdd::pad_neumann(f, margin);
    const DepthField back = frdd::crop(p, margin, margin, f.width(), f.height());
    CHECK(back == f);
  }
  CHECK_THROWS_AS(frdd::crop(f, 5, 0, 4, 4), std::invalid_argument);
}

TEST_CASE("directional differences of a constant vanish") {
  const frdd::DirectionalDifferences d = frdd::directional_differences(DepthField(4, 4, 3.0));
  for (const DepthField* f : {&d.north, &d.south, &d.east, &d.west})
    for (std::size_t i = 0; i < f->size(); ++i) CHECK((*f)[i] == 0.0);
}

TEST_CASE("directional differences on a horizontal ramp") {
  std::vector<double> v;
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 5; ++x) v.push_back(x);
  const DepthField f(5, 3, std::move(v));
  const frdd::DirectionalDifferences d = frdd::directional_differences(f);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 4; ++x) CHECK(d.east(x, y) == 1.0);
    CHECK(d.east(4, y) == 0.0);
    for (int x = 1; x < 5; ++x) CHECK(d.west(x, y) == -1.0);
    CHECK(d.west(0, y) == 0.0);
    for (int x = 0; x < 5; ++x) {
      CHECK(d.north(x, y) == 0.0);
      CHECK(d.south(x, y) == 0.0);
    }
  }
}

TEST_CASE("directional differences match a double-loop oracle") {
  const DepthField f = random_field(8, 8, -50, 50, 33);
  const frdd::DirectionalDifferences d = frdd::directional_differences(f);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      CHECK(d.north(x, y) == f.clamped(x, y - 1) - f(x, y));
      CHECK(d.south(x, y) == f.clamped(x, y + 1) - f(x, y));
      CHECK(d.east(x, y) == f.clamped(x + 1, y) - f(x, y));
      CHECK(d.west(x, y) == f.clamped(x - 1, y) - f(x, y));
    }
}

TEST_CASE("shifted differences sum to the replicate-padded 5-point Laplacian") {
  const DepthField f = random_int_field(9, 6, -100, 100, 55);
  const frdd::DirectionalDifferences d = frdd::directional_differences(f);
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x) {
      const double sum = d.north(x, y) + d.south(x, y) + d.east(x, y) + d.west(x, y);
      const double lap = f.clamped(x, y - 1) + f.clamped(x, y + 1) +
                         f.clamped(x + 1, y) + f.clamped(x - 1, y) - 4.0 * f(x, y);
      CHECK(sum == lap);
    }
}

TEST_CASE("metrics of identical fields") {
  const DepthField f = random_field(6, 6, 500, 1500, 3);
  const frdd::Metrics m = frdd::compute_metrics(f, f);
  CHECK(m.mae == 0.0);
  CHECK(m.rmse == 0.0);
  for (const auto& [th, pct] : m.rho) CHECK(pct == 100.0);
  CHECK(m.rho.size() == 3);
}

TEST_CASE("metrics of the constant-offset pair") {
  const DepthField gt(4, 4, 1000.0);
  const DepthField pred(4, 4, 1005.0);
  const frdd::Metrics m = frdd::compute_metrics(pred, gt);
  CHECK(m.mae == Catch::Approx(5.0).margin(1e-12));
  CHECK(m.rmse == Catch::Approx(5.0).margin(1e-12));
  CHECK(m.rho.at(1.02) == 100.0);
  CHECK(m.rho.at(1.05) == 100.0);
  CHECK(m.rho.at(1.10) == 100.0);
}

TEST_CASE("metrics match a scalar-loop oracle") {
  const DepthField gt = random_field(16, 16, 400, 1600, 11);
  DepthField noisy = random_field(16, 16, -40, 40, 12);
  std::vector<double> pv(gt.size());
  for (std::size_t i = 0; i < pv.size(); ++i) pv[i] = gt[i] + noisy[i];
  const DepthField pred(16, 16, std::move(pv));

  const std::vector<double> thresholds{1.01, 1.02, 1.05, 1.10, 1.5};
  const frdd::Metrics m = frdd::compute_metrics(pred, gt, thresholds);

  double abs_sum = 0.0;
  double sq_sum = 0.0;
  std::vector<int> counts(thresholds.size(), 0);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double e = pred[i] - gt[i];
    abs_sum += std::abs(e);
    sq_sum += e * e;
    const double ratio = std::max(pred[i] / gt[i], gt[i] / pred[i]);
    for (std::size_t t = 0; t < thresholds.size(); ++t)
      if (ratio <= thresholds[t]) ++counts[t];
  }
  const double n = static_cast<double>(gt.size());
  CHECK(m.mae == Catch::Approx(abs_sum / n).epsilon(1e-12));
  CHECK(m.rmse == Catch::Approx(std::sqrt(sq_sum / n)).epsilon(1e-12));
  for (std::size_t t = 0; t < thresholds.size(); ++t)
    CHECK(m.rho.at(thresholds[t]) == Catch::Approx(100.0 * counts[t] / n).epsilon(1e-12));
}

TEST_CASE("rho is monotone in the threshold and symmetric in the ratio") {
  const DepthField gt = random_field(12, 12, 500, 1500, 40);
  const DepthField pred = random_field(12, 12, 500, 1500, 41);
  const frdd::Metrics m = frdd::compute_metrics(pred, gt);
  double prev = -1.0;
  for (const auto& [th, pct] : m.rho) {
    CHECK(pct >= prev);
    CHECK(pct >= 0.0);
    CHECK(pct <= 100.0);
    prev = pct;
  }
  // Symmetry: swapping pred and gt leaves every rho unchanged (both fields
  // positive here, so the swap is legal).
  const frdd::Metrics swapped = frdd::compute_metrics(gt, pred);
  for (const auto& [th, pct] : m.rho) CHECK(swapped.rho.at(th) == pct);
  CHECK(swapped.mae == m.mae);
}

TEST_CASE("mae and rmse are invariant under a common constant shift") {
  const DepthField gt = random_int_field(8, 8, 500, 1500, 42);
  const DepthField pred = random_int_field(8, 8, 500, 1500, 43);
  std::vector<double> g2(gt.size());
  std::vector<double> p2(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    g2[i] = gt[i] + 250.0;
    p2[i] = pred[i] + 250.0;
  }
  const frdd::Metrics a = frdd::compute_metrics(pred, gt);
  const frdd::Metrics b =
      frdd::compute_metrics(DepthField(8, 8, std::move(p2)), DepthField(8, 8, std::move(g2)));
  CHECK(a.mae == b.mae);
  CHECK(a.rmse == b.rmse);
}

TEST_CASE("masked pixels are excluded from every mean and count") {
  std::vector<double> gv{1000, 1000, 1000, 1000, 1000, 1000, 1000, 1000, 1000};
  std::vector<double> pv{1000, 1000, 1000, 1000, 9999, 1000, 1000, 1000, 1000};
  std::vector<std::uint8_t> mask{1, 1, 1, 1, 0, 1, 1, 1, 1};
  const DepthField gt(3, 3, gv);
  const DepthField pred_masked(3, 3, pv, mask);
  const frdd::Metrics m = frdd::compute_metrics(pred_masked, gt);
  CHECK(m.mae == 0.0);
  CHECK(m.rho.at(1.02) == 100.0);

  // Mask on either side excludes the pixel.
  const DepthField gt_masked(3, 3, gv, mask);
  const frdd::Metrics m2 = frdd::compute_metrics(DepthField(3, 3, pv), gt_masked);
  CHECK(m2.mae == 0.0);

  // Without the mask the outlier counts.
  const frdd::Metrics m3 = frdd::compute_metrics(DepthField(3, 3, pv), gt);
  CHECK(m3.mae > 0.0);
  CHECK(m3.rho.at(1.10) < 100.0);
}

TEST_CASE("metrics validation errors") {
  const DepthField a(4, 4, 1000.0);
  const DepthField b(4, 5, 1000.0);
  CHECK_THROWS_AS(frdd::compute_metrics(a, b), std::invalid_argument);

  // gt <= 0 at a valid pixel is an error; at a masked pixel it is not.
  std::vector<double> gv(16, 1000.0);
  gv[5] = 0.0;
  CHECK_THROWS_AS(frdd::compute_metrics(a, DepthField(4, 4, gv)), std::invalid_argument);
  std::vector<std::uint8_t> mask(16, 1);
  mask[5] = 0;
  CHECK_NOTHROW(frdd::compute_metrics(a, DepthField(4, 4, gv, mask)));

  // Fully-masked input has no pixels to average.
  const std::vector<std::uint8_t> none(16, 0);
  CHECK_THROWS_AS(
      frdd::compute_metrics(a, DepthField(4, 4, std::vector<double>(16, 1000.0), none)),
      std::invalid_argument);
}

TEST_CASE("non-positive predictions never satisfy a ratio threshold") {
  std::vector<double> pv(16, 1000.0);
  pv[3] = 0.0;
  pv[7] = -25.0;
  const DepthField pred(4, 4, std::move(pv));
  const DepthField gt(4, 4, 1000.0);
  const frdd::Metrics m = frdd::compute_metrics(pred, gt, std::vector<double>{1e9});
  CHECK(m.rho.at(1e9) == Catch::Approx(100.0 * 14.0 / 16.0).epsilon(1e-12));
}
