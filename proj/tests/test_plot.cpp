#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "ellband/band.hpp"
#include "ellband/plot.hpp"
#include "xml_check.hpp"

using namespace ellband;

namespace {

TestingBand uniform_band(int n, double alpha = 0.05) {
  BandRequest req;
  req.n = n;
  req.dist = ReferenceDistribution::uniform();
  req.alpha = alpha;
  return get_qq_band(req);
}

}  // namespace

TEST_CASE("band and points share x-coordinates rank for rank") {
  const TestingBand band = uniform_band(9);
  const std::vector<double> obs = expected_points(9, ExpectedPointsMode::median);
  const PlotSpec spec = make_plot(obs, band, {});
  REQUIRE(spec.band.has_value());
  REQUIRE(spec.points.size() == 1);
  for (int i = 0; i < 9; ++i) {
    CHECK(spec.points[0].x[i] == spec.band->x[i]);
    CHECK(spec.lines[0].x[i] == spec.band->x[i]);
  }
}

TEST_CASE("difference mode zeroes an on-line sample and inverts exactly") {
  const TestingBand band = uniform_band(7);
  const std::vector<double> obs = band.expected;  // exactly on the line
  PlotOptions options;
  options.difference = true;
  const PlotSpec spec = make_plot(obs, band, options);
  for (double y : spec.points[0].y) CHECK(y == 0.0);
  for (double y : spec.lines[0].y) CHECK(y == 0.0);

  // Un-differencing recovers the raw values bit for bit.
  std::vector<double> scrambled{0.41, 0.09, 0.77, 0.3, 0.52, 0.66, 0.18};
  const PlotSpec diff = make_plot(scrambled, band, options);
  const PlotSpec plain = make_plot(scrambled, band, {});
  for (size_t i = 0; i < 7; ++i) {
    CHECK(diff.points[0].y[i] + diff.points[0].x[i] == plain.points[0].y[i]);
  }
}

TEST_CASE("-log10 transform") {
  const TestingBand band = uniform_band(3);
  const std::vector<double> obs{0.01, 0.5, 0.9};
  PlotOptions options;
  options.log10_axes = true;
  const PlotSpec spec = make_plot(obs, band, options);
  CHECK(spec.points[0].y[0] == doctest::Approx(2.0).epsilon(1e-15));
  // The transform reverses order, so band lo/hi stay ordered after the swap.
  for (size_t i = 0; i < 3; ++i) {
    CHECK(spec.band->lo[i] <= spec.band->hi[i]);
  }
  const std::vector<double> with_zero{0.0, 0.5, 0.9};
  CHECK_THROWS_AS(make_plot(with_zero, band, options), log10_domain_error);
  try {
    make_plot(with_zero, band, options);
  } catch (const log10_domain_error& e) {
    CHECK(e.value() == 0.0);
  }
}

TEST_CASE("size mismatch is rejected unless the band is effective-n") {
  const TestingBand band = uniform_band(5);
  const std::vector<double> obs{0.1, 0.2, 0.3};
  CHECK_THROWS_AS(make_plot(obs, band, {}), std::invalid_argument);

  BandRequest req;
  req.n = 10;
  req.dist = ReferenceDistribution::uniform();
  const TestingBand eff = band_effective_n(5, req);
  const PlotSpec spec = make_plot(std::vector<double>{0.1, 0.2, 0.3, 0.4,
                                                      0.45, 0.5, 0.6, 0.7,
                                                      0.8, 0.9},
                                  eff, {});
  CHECK(spec.points[0].x.size() == 10);
  CHECK(spec.band->x.size() == 5);
}

TEST_CASE("svg output is deterministic and well-formed") {
  const TestingBand band = uniform_band(3);
  const std::vector<double> obs{0.2, 0.5, 0.8};
  const PlotSpec spec = make_plot(obs, band, {});
  const std::string svg1 = emit_svg(spec);
  const std::string svg2 = emit_svg(spec);
  CHECK(svg1 == svg2);
  std::string error;
  CHECK_MESSAGE(xmlcheck::well_formed(svg1, &error), error);
  CHECK(xmlcheck::count_occurrences(svg1, "<polygon") == 1);
  CHECK(xmlcheck::count_occurrences(svg1, "<polyline") == 1);
  CHECK(xmlcheck::count_occurrences(svg1, "<circle") == 3);
}

TEST_CASE("empty spec renders axes only") {
  const PlotSpec empty;
  const std::string svg = emit_svg(empty);
  std::string error;
  CHECK_MESSAGE(xmlcheck::well_formed(svg, &error), error);
  CHECK(xmlcheck::count_occurrences(svg, "<polygon") == 0);
  CHECK(xmlcheck::count_occurrences(svg, "<circle") == 0);
  CHECK(xmlcheck::count_occurrences(svg, "<text") > 0);
}

TEST_CASE("overlay adds a second series on the shared band") {
  const TestingBand band = uniform_band(4);
  const std::vector<double> a{0.1, 0.3, 0.6, 0.9};
  const std::vector<double> b{0.15, 0.35, 0.65, 0.95};
  PlotSpec spec = make_plot(a, band, {});
  add_overlay(spec, b, band, {}, PlotStyle{"#d6604d", 2.0, 1.0});
  const std::string svg = emit_svg(spec);
  std::string error;
  CHECK_MESSAGE(xmlcheck::well_formed(svg, &error), error);
  CHECK(xmlcheck::count_occurrences(svg, "class=\"series\"") == 2);
  CHECK(xmlcheck::count_occurrences(svg, "<polygon") == 1);
  CHECK(xmlcheck::count_occurrences(svg, "<circle") == 8);
}

TEST_CASE("one-sided band with infinite upper edge still renders") {
  BandRequest req;
  req.n = 4;
  req.dist = ReferenceDistribution::normal(0, 1);
  req.side = Side::one_sided;
  const TestingBand band = get_qq_band(req);
  const std::vector<double> obs{-1.0, -0.2, 0.4, 1.3};
  const std::string svg = emit_svg(make_plot(obs, band, {}));
  std::string error;
  CHECK_MESSAGE(xmlcheck::well_formed(svg, &error), error);
  CHECK(svg.find("inf") == std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
}

TEST_CASE("csv table emission") {
  TestingBand empty;
  CHECK(emit_table_csv(empty) == "rank,expected,observed,lower,upper\r\n");

  const TestingBand band = uniform_band(4);
  const std::vector<double> obs{0.9, 0.1, 0.5, 0.3};
  const std::string csv = emit_table_csv(band, obs);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "rank,expected,observed,lower,upper\r");
  int rank = 0;
  double prev_expected = -1.0;
  std::vector<double> sorted_obs{0.1, 0.3, 0.5, 0.9};
  while (std::getline(in, line)) {
    ++rank;
    std::istringstream row(line);
    std::string field;
    std::getline(row, field, ',');
    CHECK(std::stoi(field) == rank);
    std::getline(row, field, ',');
    const double expected = std::stod(field);
    CHECK(expected > prev_expected);
    prev_expected = expected;
    std::getline(row, field, ',');
    CHECK(std::stod(field) ==
          doctest::Approx(sorted_obs[rank - 1]).epsilon(1e-15));
    std::getline(row, field, ',');
    const double lower = std::stod(field);
    std::getline(row, field, ',');
    CHECK(lower < std::stod(field));
  }
  CHECK(rank == 4);

  // Band-only output leaves the observed column empty.
  const std::string band_only = emit_table_csv(band);
  CHECK(band_only.find(",,") != std::string::npos);
}
