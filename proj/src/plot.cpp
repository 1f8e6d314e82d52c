#include "ellband/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "double_format.hpp"

namespace ellband {

namespace {

void check_log10_ok(std::span<const double> values) {
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw log10_domain_error(v);
  }
}

void neglog10_inplace(std::vector<double>& values) {
  for (double& v : values) v = -std::log10(v);
}

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::stable_sort(out.begin(), out.end());
  return out;
}

struct SeriesData {
  std::vector<double> x;
  std::vector<double> y;
};

// Shared transform pipeline: -log10 first (both axes), then difference
// (subtract the expected coordinate rank by rank).
SeriesData transform_series(std::vector<double> x, std::vector<double> y,
                            const PlotOptions& options) {
  if (options.log10_axes) {
    check_log10_ok(x);
    check_log10_ok(y);
    neglog10_inplace(x);
    neglog10_inplace(y);
  }
  if (options.difference) {
    for (size_t i = 0; i < y.size(); ++i) y[i] -= x[i];
  }
  return {std::move(x), std::move(y)};
}

std::vector<double> points_x_coordinates(size_t n_obs, const TestingBand& band,
                                         const PlotOptions& options) {
  if (!band.effective_n_decoupled) {
    if (static_cast<int>(n_obs) != band.n) {
      throw std::invalid_argument("observation count does not match band size");
    }
    return band.expected;
  }
  const std::vector<double> pts =
      expected_points(static_cast<int>(n_obs), options.points_mode);
  std::vector<double> x(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) x[i] = band.dist.quantile(pts[i]);
  return x;
}

PointsLayer make_points_layer(std::span<const double> observations,
                              const TestingBand& band,
                              const PlotOptions& options,
                              const PlotStyle& style) {
  SeriesData s = transform_series(points_x_coordinates(observations.size(), band, options),
                                  sorted_copy(observations), options);
  return {std::move(s.x), std::move(s.y), style};
}

}  // namespace

PlotSpec make_plot(std::span<const double> observations,
                   const TestingBand& band, const PlotOptions& options) {
  PlotSpec spec;
  spec.ylim = options.ylim;

  BandLayer band_layer;
  {
    SeriesData lo = transform_series(band.expected, band.lower, options);
    SeriesData hi = transform_series(band.expected, band.upper, options);
    band_layer.x = std::move(lo.x);
    band_layer.lo = std::move(lo.y);
    band_layer.hi = std::move(hi.y);
    // -log10 reverses order; keep lo <= hi elementwise.
    for (size_t i = 0; i < band_layer.lo.size(); ++i) {
      if (band_layer.lo[i] > band_layer.hi[i]) {
        std::swap(band_layer.lo[i], band_layer.hi[i]);
      }
    }
  }
  spec.band = std::move(band_layer);

  // Expected line: identity in data scale, drawn through the expected points.
  {
    SeriesData line = transform_series(band.expected, band.expected, options);
    PlotStyle line_style;
    line_style.color = "#b2182b";
    spec.lines.push_back({std::move(line.x), std::move(line.y), line_style});
  }

  spec.points.push_back(
      make_points_layer(observations, band, options, options.points_style));

  if (options.log10_axes) {
    spec.x_label = "Expected quantiles (-log10)";
    spec.y_label = options.difference ? "Observed - expected (-log10 scale)"
                                      : "Observed quantiles (-log10)";
  } else if (options.difference) {
    spec.y_label = "Observed - expected quantiles";
  }
  return spec;
}

void add_overlay(PlotSpec& spec, std::span<const double> observations,
                 const TestingBand& band, const PlotOptions& options,
                 const PlotStyle& style) {
  spec.points.push_back(make_points_layer(observations, band, options, style));
}

namespace {

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Heckbert's nice-number tick spacing.
double nice_step(double range, int target_ticks) {
  const double raw = range / std::max(1, target_ticks);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double nice;
  if (frac <= 1.0) {
    nice = 1.0;
  } else if (frac <= 2.0) {
    nice = 2.0;
  } else if (frac <= 5.0) {
    nice = 5.0;
  } else {
    nice = 10.0;
  }
  return nice * mag;
}

struct Extent {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(std::span<const double> values) {
    for (double v : values) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void finalize() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

}  // namespace

std::string emit_svg(const PlotSpec& spec) {
  constexpr double margin_left = 62.0;
  constexpr double margin_right = 16.0;
  constexpr double margin_top = 16.0;
  constexpr double margin_bottom = 48.0;
  const double w = spec.width;
  const double h = spec.height;
  const double plot_w = w - margin_left - margin_right;
  const double plot_h = h - margin_top - margin_bottom;

  Extent ex;
  Extent ey;
  if (spec.band) {
    ex.include(spec.band->x);
    ey.include(spec.band->lo);
    ey.include(spec.band->hi);
  }
  for (const auto& l : spec.lines) {
    ex.include(l.x);
    ey.include(l.y);
  }
  for (const auto& p : spec.points) {
    ex.include(p.x);
    ey.include(p.y);
  }
  ex.finalize();
  ey.finalize();
  if (spec.ylim) {
    ey.lo = spec.ylim->first;
    ey.hi = spec.ylim->second;
  }

  // Non-finite values (e.g. the infinite upper edge of a one-sided band) map
  // just outside the clip region.
  const auto sx = [&](double v) {
    if (!std::isfinite(v)) return v > 0 ? w + plot_w : -plot_w;
    const double px = margin_left + (v - ex.lo) / (ex.hi - ex.lo) * plot_w;
    return std::clamp(px, -plot_w, w + plot_w);
  };
  const auto sy = [&](double v) {
    if (!std::isfinite(v)) return v > 0 ? -plot_h : h + plot_h;
    const double py = margin_top + (ey.hi - v) / (ey.hi - ey.lo) * plot_h;
    return std::clamp(py, -plot_h, h + plot_h);
  };

  std::string svg;
  svg.reserve(4096);
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         fmt6(w) + "\" height=\"" + fmt6(h) + "\" viewBox=\"0 0 " + fmt6(w) +
         " " + fmt6(h) + "\">\n";
  svg += "<rect width=\"" + fmt6(w) + "\" height=\"" + fmt6(h) +
         "\" fill=\"#ffffff\"/>\n";
  svg += "<clipPath id=\"plotarea\"><rect x=\"" + fmt6(margin_left) +
         "\" y=\"" + fmt6(margin_top) + "\" width=\"" + fmt6(plot_w) +
         "\" height=\"" + fmt6(plot_h) + "\"/></clipPath>\n";

  // Axes, ticks, labels.
  svg += "<g class=\"axes\" stroke=\"#000000\" stroke-width=\"1\" fill=\"none\">\n";
  svg += "<rect x=\"" + fmt6(margin_left) + "\" y=\"" + fmt6(margin_top) +
         "\" width=\"" + fmt6(plot_w) + "\" height=\"" + fmt6(plot_h) + "\"/>\n";
  svg += "</g>\n<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"12\" "
         "fill=\"#000000\">\n";
  const double x_step = nice_step(ex.hi - ex.lo, 5);
  for (double t = std::ceil(ex.lo / x_step) * x_step; t <= ex.hi + 1e-9 * x_step;
       t += x_step) {
    const double px = sx(t);
    svg += "<line x1=\"" + fmt6(px) + "\" y1=\"" + fmt6(margin_top + plot_h) +
           "\" x2=\"" + fmt6(px) + "\" y2=\"" +
           fmt6(margin_top + plot_h + 5.0) + "\" stroke=\"#000000\"/>\n";
    svg += "<text x=\"" + fmt6(px) + "\" y=\"" +
           fmt6(margin_top + plot_h + 20.0) +
           "\" text-anchor=\"middle\">" + fmt6(t + 0.0) + "</text>\n";
  }
  const double y_step = nice_step(ey.hi - ey.lo, 5);
  for (double t = std::ceil(ey.lo / y_step) * y_step; t <= ey.hi + 1e-9 * y_step;
       t += y_step) {
    const double py = sy(t);
    svg += "<line x1=\"" + fmt6(margin_left - 5.0) + "\" y1=\"" + fmt6(py) +
           "\" x2=\"" + fmt6(margin_left) + "\" y2=\"" + fmt6(py) +
           "\" stroke=\"#000000\"/>\n";
    svg += "<text x=\"" + fmt6(margin_left - 9.0) + "\" y=\"" + fmt6(py + 4.0) +
           "\" text-anchor=\"end\">" + fmt6(t + 0.0) + "</text>\n";
  }
  svg += "<text x=\"" + fmt6(margin_left + plot_w / 2.0) + "\" y=\"" +
         fmt6(h - 10.0) + "\" text-anchor=\"middle\">" + spec.x_label +
         "</text>\n";
  svg += "<text x=\"14\" y=\"" + fmt6(margin_top + plot_h / 2.0) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
         fmt6(margin_top + plot_h / 2.0) + ")\">" + spec.y_label + "</text>\n";
  svg += "</g>\n";

  if (spec.band && !spec.band->x.empty()) {
    svg += "<g class=\"band\" clip-path=\"url(#plotarea)\">\n<polygon fill=\"" +
           spec.band->fill + "\" stroke=\"none\" points=\"";
    const auto& b = *spec.band;
    for (size_t i = 0; i < b.x.size(); ++i) {
      if (i) svg += ' ';
      svg += fmt6(sx(b.x[i])) + "," + fmt6(sy(b.hi[i]));
    }
    for (size_t i = b.x.size(); i-- > 0;) {
      svg += ' ';
      svg += fmt6(sx(b.x[i])) + "," + fmt6(sy(b.lo[i]));
    }
    svg += "\"/>\n</g>\n";
  }
  for (const auto& line : spec.lines) {
    if (line.x.empty()) continue;
    svg += "<g class=\"line\" clip-path=\"url(#plotarea)\">\n<polyline fill=\"none\" stroke=\"" +
           line.style.color + "\" stroke-width=\"" + fmt6(line.style.line_width) +
           "\" points=\"";
    for (size_t i = 0; i < line.x.size(); ++i) {
      if (i) svg += ' ';
      svg += fmt6(sx(line.x[i])) + "," + fmt6(sy(line.y[i]));
    }
    svg += "\"/>\n</g>\n";
  }
  for (const auto& pts : spec.points) {
    svg += "<g class=\"series\" clip-path=\"url(#plotarea)\" fill=\"" +
           pts.style.color + "\">\n";
    for (size_t i = 0; i < pts.x.size(); ++i) {
      svg += "<circle cx=\"" + fmt6(sx(pts.x[i])) + "\" cy=\"" +
             fmt6(sy(pts.y[i])) + "\" r=\"" + fmt6(pts.style.point_radius) +
             "\"/>\n";
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string emit_table_csv(const TestingBand& band,
                           std::span<const double> observations) {
  std::string out = "rank,expected,observed,lower,upper\r\n";
  if (band.n <= 0) return out;
  std::vector<double> sorted;
  if (!observations.empty()) {
    if (static_cast<int>(observations.size()) != band.n) {
      throw std::invalid_argument("observation count does not match band size");
    }
    sorted = sorted_copy(observations);
  }
  for (int i = 0; i < band.n; ++i) {
    out += std::to_string(i + 1);
    out += ',';
    detail::append_double(out, band.expected[static_cast<size_t>(i)]);
    out += ',';
    if (!sorted.empty()) detail::append_double(out, sorted[static_cast<size_t>(i)]);
    out += ',';
    detail::append_double(out, band.lower[static_cast<size_t>(i)]);
    out += ',';
    detail::append_double(out, band.upper[static_cast<size_t>(i)]);
    out += "\r\n";
  }
  return out;
}

}  // namespace ellband
