#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ellband/band.hpp"

namespace ellband {

// A plotted value was <= 0 while a -log10 axis was requested.
class log10_domain_error : public std::domain_error {
 public:
  explicit log10_domain_error(double value)
      : std::domain_error("-log10 axes require positive values; got " +
                          std::to_string(value)),
        value_(value) {}
  double value() const { return value_; }

 private:
  double value_;
};

struct PlotStyle {
  std::string color = "#2166ac";
  double point_radius = 2.0;
  double line_width = 1.0;
};

struct PointsLayer {
  std::vector<double> x;
  std::vector<double> y;
  PlotStyle style;
};

struct LineLayer {
  std::vector<double> x;
  std::vector<double> y;
  PlotStyle style;
};

struct BandLayer {
  std::vector<double> x;
  std::vector<double> lo;
  std::vector<double> hi;
  std::string fill = "#d4d4d4";
};

struct PlotSpec {
  std::optional<BandLayer> band;
  std::vector<LineLayer> lines;
  std::vector<PointsLayer> points;
  std::string x_label = "Expected quantiles";
  std::string y_label = "Observed quantiles";
  int width = 640;
  int height = 480;
  std::optional<std::pair<double, double>> ylim;
};

struct PlotOptions {
  bool difference = false;
  bool log10_axes = false;
  std::optional<std::pair<double, double>> ylim;
  PlotStyle points_style;
  ExpectedPointsMode points_mode = ExpectedPointsMode::median;
};

// Band plus observed points plus the expected line, with the band and points
// sharing x-coordinates rank for rank (unless the band was built for an
// effective n, which decouples them).
PlotSpec make_plot(std::span<const double> observations,
                   const TestingBand& band, const PlotOptions& options);

// Adds a second sample to the same axes and band.
void add_overlay(PlotSpec& spec, std::span<const double> observations,
                 const TestingBand& band, const PlotOptions& options,
                 const PlotStyle& style);

// Standalone deterministic SVG 1.1 document; identical specs produce
// byte-identical output.
std::string emit_svg(const PlotSpec& spec);

// CSV table of the band (RFC 4180): rank, expected, observed, lower, upper.
// The observed column is empty when no observations are supplied.
std::string emit_table_csv(const TestingBand& band,
                           std::span<const double> observations = {});

}  // namespace ellband
