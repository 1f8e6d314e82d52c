#include "ellband/band.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "double_format.hpp"
#include "ellband/ell_one_sided.hpp"
#include "ellband/ell_two_sided.hpp"
#include "ellband/numerics.hpp"

namespace ellband {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> quantiles_of(const ReferenceDistribution& dist,
                                 std::span<const double> probs) {
  std::vector<double> out(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) out[i] = dist.quantile(probs[i]);
  return out;
}

ReferenceDistribution resolve_distribution(const BandRequest& req) {
  if (req.estimation == Estimator::known_params) return req.dist;
  if (req.data.empty()) {
    throw std::invalid_argument("parameter estimation requires observations");
  }
  switch (req.dist.family) {
    case Family::uniform:
      throw std::invalid_argument("uniform reference has no parameters to estimate");
    case Family::normal: {
      const auto [mu, sigma] = estimate_normal(req.data, req.estimation);
      return ReferenceDistribution::normal(mu, sigma);
    }
    default:
      if (req.estimation != Estimator::mle) {
        throw std::invalid_argument(
            "robust location-scale estimators apply to the normal family; "
            "use mle for other families");
      }
      return mle_fit(req.data, req.dist.family);
  }
}

TestingBand build_band(int n, const BandRequest& req) {
  if (n < 1) throw std::domain_error("band requires n >= 1");
  if (!(req.alpha > 0.0 && req.alpha < 1.0)) {
    throw std::domain_error("alpha must be in (0, 1)");
  }
  TestingBand band;
  band.n = n;
  band.alpha = req.alpha;
  band.method = req.method;
  band.side = req.side;
  band.estimation = req.estimation;
  band.dist = resolve_distribution(req);

  switch (req.method) {
    case BandMethod::ell: {
      const EtaResult r =
          resolve_eta({n, req.alpha, req.side, req.policy}, req.tables);
      band.eta = r.eta;
      band.eta_path = path_name(r.path);
      if (req.side == Side::two_sided) {
        TwoSidedBounds b = bounds_from_eta_two_sided(n, r.eta);
        band.prob_lower = std::move(b.lower);
        band.prob_upper = std::move(b.upper);
      } else {
        OneSidedBounds b = bounds_from_eta_one_sided(n, r.eta);
        band.prob_lower = std::move(b.lower);
        band.prob_upper.assign(static_cast<size_t>(n), 1.0);
      }
      break;
    }
    case BandMethod::ks: {
      if (req.side != Side::two_sided) {
        throw std::invalid_argument("the KS comparison band is two-sided only");
      }
      const double d = kolmogorov_critical(req.alpha, n);
      band.prob_lower.resize(static_cast<size_t>(n));
      band.prob_upper.resize(static_cast<size_t>(n));
      for (int i = 1; i <= n; ++i) {
        band.prob_lower[static_cast<size_t>(i - 1)] =
            std::max(0.0, static_cast<double>(i) / n - d);
        band.prob_upper[static_cast<size_t>(i - 1)] =
            std::min(1.0, static_cast<double>(i - 1) / n + d);
      }
      break;
    }
    case BandMethod::pointwise: {
      band.prob_lower.resize(static_cast<size_t>(n));
      band.prob_upper.resize(static_cast<size_t>(n));
      const double q_lo =
          req.side == Side::two_sided ? req.alpha / 2.0 : req.alpha;
      for (int i = 1; i <= n; ++i) {
        const BetaParams params{static_cast<double>(i),
                                static_cast<double>(n - i + 1)};
        band.prob_lower[static_cast<size_t>(i - 1)] = beta_quantile(q_lo, params);
        band.prob_upper[static_cast<size_t>(i - 1)] =
            req.side == Side::two_sided
                ? beta_quantile(1.0 - req.alpha / 2.0, params)
                : 1.0;
      }
      break;
    }
  }

  band.lower = quantiles_of(band.dist, band.prob_lower);
  band.upper = quantiles_of(band.dist, band.prob_upper);
  band.expected =
      quantiles_of(band.dist, expected_points(n, req.points_mode));
  return band;
}

}  // namespace

const char* band_method_name(BandMethod m) {
  switch (m) {
    case BandMethod::ell: return "ell";
    case BandMethod::ks: return "ks";
    case BandMethod::pointwise: return "pointwise";
  }
  return "?";
}

BandMethod band_method_from_name(std::string_view name) {
  if (name == "ell") return BandMethod::ell;
  if (name == "ks") return BandMethod::ks;
  if (name == "pointwise") return BandMethod::pointwise;
  throw std::invalid_argument("unknown band method '" + std::string(name) + "'");
}

std::vector<double> expected_points(int n, ExpectedPointsMode mode) {
  if (n < 1) throw std::domain_error("n must be >= 1");
  std::vector<double> pts(static_cast<size_t>(n));
  switch (mode) {
    case ExpectedPointsMode::mean_blom: {
      const double a = n <= 10 ? 3.0 / 8.0 : 0.5;
      for (int i = 1; i <= n; ++i) {
        pts[static_cast<size_t>(i - 1)] = (i - a) / (n + 1.0 - 2.0 * a);
      }
      break;
    }
    case ExpectedPointsMode::mean_uniform:
      for (int i = 1; i <= n; ++i) {
        pts[static_cast<size_t>(i - 1)] = static_cast<double>(i) / (n + 1.0);
      }
      break;
    case ExpectedPointsMode::median: {
      double guess = 0.5 / n;
      for (int i = 1; i <= n; ++i) {
        const BetaParams params{static_cast<double>(i),
                                static_cast<double>(n - i + 1)};
        guess = beta_quantile_guess(0.5, params, guess);
        pts[static_cast<size_t>(i - 1)] = guess;
        guess = std::min(guess + 1.0 / (n + 1.0), 1.0 - 1e-16);
      }
      break;
    }
  }
  return pts;
}

TestingBand get_qq_band(const BandRequest& request) {
  const int n =
      request.data.empty() ? request.n : static_cast<int>(request.data.size());
  return build_band(n, request);
}

TestingBand band_effective_n(int neff, const BandRequest& request) {
  TestingBand band = build_band(neff, request);
  band.effective_n_decoupled = true;
  return band;
}

BandCheckResult band_check(std::span<const double> observations,
                           const TestingBand& band) {
  if (static_cast<int>(observations.size()) != band.n) {
    throw std::invalid_argument("observation count does not match band size");
  }
  std::vector<double> sorted(observations.begin(), observations.end());
  std::stable_sort(sorted.begin(), sorted.end());
  BandCheckResult res;
  // One-sided bands only reject below the lower bounds; their stored upper
  // endpoints are schema filler, not test thresholds.
  const bool check_upper = band.side == Side::two_sided;
  for (int i = 0; i < band.n; ++i) {
    const double x = sorted[static_cast<size_t>(i)];
    if (x <= band.lower[static_cast<size_t>(i)]) {
      return {true, i + 1, BandCheckResult::Direction::low};
    }
    if (check_upper && x >= band.upper[static_cast<size_t>(i)]) {
      return {true, i + 1, BandCheckResult::Direction::high};
    }
  }
  return res;
}

namespace {

void append_array(std::string& out, const char* key,
                  const std::vector<double>& values) {
  out += '"';
  out += key;
  out += "\":[";
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    detail::append_json_number(out, values[i]);
  }
  out += ']';
}

}  // namespace

std::string band_to_json(const TestingBand& band) {
  std::string out;
  out.reserve(64 + 18 * 5 * static_cast<size_t>(band.n));
  out += "{\"n\":";
  out += std::to_string(band.n);
  out += ",\"alpha\":";
  detail::append_double(out, band.alpha);
  out += ",\"eta\":";
  if (band.method == BandMethod::ell) {
    detail::append_double(out, band.eta);
  } else {
    out += "null";
  }
  out += ",\"method\":\"";
  out += band_method_name(band.method);
  out += "\",\"side\":\"";
  out += side_name(band.side);
  out += "\",\"family\":\"";
  out += family_name(band.dist.family);
  out += "\",\"params\":{";
  switch (band.dist.family) {
    case Family::uniform:
      break;
    case Family::normal:
      out += "\"mu\":";
      detail::append_double(out, band.dist.p1);
      out += ",\"sigma\":";
      detail::append_double(out, band.dist.p2);
      break;
    case Family::chi_square:
    case Family::student_t:
      out += "\"df\":";
      detail::append_double(out, band.dist.p1);
      break;
    case Family::exponential:
      out += "\"rate\":";
      detail::append_double(out, band.dist.p1);
      break;
  }
  out += "},";
  append_array(out, "prob_lower", band.prob_lower);
  out += ',';
  append_array(out, "prob_upper", band.prob_upper);
  out += ',';
  append_array(out, "lower", band.lower);
  out += ',';
  append_array(out, "upper", band.upper);
  out += ',';
  append_array(out, "expected", band.expected);
  out += ",\"generated_by_path\":";
  if (band.method == BandMethod::ell) {
    out += '"';
    out += band.eta_path;
    out += '"';
  } else {
    out += "null";
  }
  out += "}";
  return out;
}

TestingBand band_from_json(std::string_view text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  TestingBand band;
  band.n = j.at("n").get<int>();
  band.alpha = j.at("alpha").get<double>();
  band.method = band_method_from_name(j.at("method").get<std::string>());
  const std::string side = j.at("side").get<std::string>();
  band.side = side == "one-sided" ? Side::one_sided : Side::two_sided;
  if (!j.at("eta").is_null()) band.eta = j.at("eta").get<double>();
  if (j.contains("generated_by_path") && !j.at("generated_by_path").is_null()) {
    band.eta_path = j.at("generated_by_path").get<std::string>();
  }
  const Family family = family_from_name(j.at("family").get<std::string>());
  const nlohmann::json& params = j.at("params");
  switch (family) {
    case Family::uniform:
      band.dist = ReferenceDistribution::uniform();
      break;
    case Family::normal:
      band.dist = ReferenceDistribution::normal(params.at("mu").get<double>(),
                                                params.at("sigma").get<double>());
      break;
    case Family::chi_square:
      band.dist = ReferenceDistribution::chi_square(params.at("df").get<double>());
      break;
    case Family::student_t:
      band.dist = ReferenceDistribution::student_t(params.at("df").get<double>());
      break;
    case Family::exponential:
      band.dist =
          ReferenceDistribution::exponential(params.at("rate").get<double>());
      break;
  }
  const auto read_array = [&](const char* key, double null_value) {
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
      out.push_back(v.is_null() ? null_value : v.get<double>());
    }
    return out;
  };
  band.prob_lower = read_array("prob_lower", 0.0);
  band.prob_upper = read_array("prob_upper", 1.0);
  band.lower = read_array("lower", -kInf);
  band.upper = read_array("upper", kInf);
  band.expected = read_array("expected", 0.0);
  if (static_cast<int>(band.prob_lower.size()) != band.n ||
      static_cast<int>(band.prob_upper.size()) != band.n ||
      static_cast<int>(band.lower.size()) != band.n ||
      static_cast<int>(band.upper.size()) != band.n ||
      static_cast<int>(band.expected.size()) != band.n) {
    throw std::invalid_argument("band arrays do not match n");
  }
  return band;
}

}  // namespace ellband
