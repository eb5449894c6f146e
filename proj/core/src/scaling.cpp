#include "antikz/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "antikz/error.hpp"
#include "format.hpp"

namespace antikz {

namespace {

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double var_intercept = 0.0;
  double var_slope = 0.0;
  double rss = 0.0;
  std::vector<double> residuals;
};

// y = intercept + slope * x. Empty weights mean unweighted, in which case the
// covariance is scaled by the residual variance; otherwise weights are 1/sigma^2.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& weights) {
  const std::size_t n = x.size();
  const bool weighted = !weights.empty();
  double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weighted ? weights[i] : 1.0;
    s += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  const double det = s * sxx - sx * sx;
  if (!(det > 0.0)) throw Error(ErrorKind::InsufficientData, "regression abscissae are degenerate");
  LinearFit fit;
  fit.slope = (s * sxy - sx * sy) / det;
  fit.intercept = (sxx * sy - sx * sxy) / det;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.residuals.push_back(r);
    fit.rss += r * r;
  }
  const double scale = weighted ? 1.0 : (n > 2 ? fit.rss / static_cast<double>(n - 2) : 0.0);
  fit.var_intercept = scale * sxx / det;
  fit.var_slope = scale * s / det;
  return fit;
}

std::size_t distinct_count(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

bool all_positive_se(const std::vector<double>& se) {
  return std::all_of(se.begin(), se.end(), [](double v) { return v > 0.0 && std::isfinite(v); });
}

std::vector<DefectRecord> sorted_by_tau(std::vector<DefectRecord> v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.tau < b.tau; });
  return v;
}

}  // namespace

KzFit fit_kz_exponent(const std::vector<DefectRecord>& baseline) {
  std::vector<double> taus;
  for (const auto& r : baseline) taus.push_back(r.tau);
  if (distinct_count(taus) < 4) {
    throw Error(ErrorKind::InsufficientData, "KZ fit needs at least 4 distinct tau values");
  }
  std::vector<double> x, y, se;
  for (const auto& r : baseline) {
    if (!(r.nw > 0.0) || !(r.tau > 0.0)) {
      throw Error(ErrorKind::NonPositive, "KZ fit needs n_W > 0 and tau > 0 (tau = " + fmt_real(r.tau) + ")");
    }
    x.push_back(std::log(r.tau));
    y.push_back(std::log(r.nw));
    se.push_back(r.nw_se / r.nw);
  }
  std::vector<double> w;
  if (all_positive_se(se)) {
    for (double s : se) w.push_back(1.0 / (s * s));
  }
  const LinearFit lf = linear_fit(x, y, w);
  KzFit fit;
  fit.weighted = !w.empty();
  fit.c = std::exp(lf.intercept);
  fit.beta = -lf.slope;
  fit.c_se = fit.c * std::sqrt(lf.var_intercept);
  fit.beta_se = std::sqrt(lf.var_slope);
  fit.residuals = lf.residuals;
  fit.residual_norm = std::sqrt(lf.rss);
  return fit;
}

NoiseRateFit fit_noise_rate(const std::vector<DefectRecord>& noisy,
                            const std::vector<DefectRecord>& baseline) {
  if (noisy.size() != baseline.size()) {
    throw Error(ErrorKind::GridMismatch, "noisy and baseline tau grids have different sizes");
  }
  if (noisy.size() < 3) throw Error(ErrorKind::InsufficientData, "noise-rate fit needs at least 3 tau values");
  NoiseRateFit fit;
  fit.w2 = noisy.front().w2;
  std::vector<double> var;
  for (const DefectRecord& r : noisy) {
    auto it = std::find_if(baseline.begin(), baseline.end(), [&](const DefectRecord& b) {
      return std::abs(b.tau - r.tau) <= 1e-12 * std::abs(r.tau);
    });
    if (it == baseline.end()) {
      throw Error(ErrorKind::GridMismatch, "no baseline record at tau = " + fmt_real(r.tau));
    }
    fit.taus.push_back(r.tau);
    fit.delta_n.push_back(r.nw - it->nw);
    var.push_back(r.nw_se * r.nw_se + it->nw_se * it->nw_se);
  }
  const bool weighted = all_positive_se(var);
  double sty = 0.0, stt = 0.0;
  for (std::size_t i = 0; i < fit.taus.size(); ++i) {
    const double w = weighted ? 1.0 / var[i] : 1.0;
    sty += w * fit.taus[i] * fit.delta_n[i];
    stt += w * fit.taus[i] * fit.taus[i];
  }
  fit.delta_r = sty / stt;

  double rss = 0.0, mean = 0.0;
  for (double d : fit.delta_n) mean += d;
  mean /= static_cast<double>(fit.delta_n.size());
  double tss = 0.0;
  for (std::size_t i = 0; i < fit.taus.size(); ++i) {
    const double r = fit.delta_n[i] - fit.delta_r * fit.taus[i];
    fit.residuals.push_back(r);
    rss += r * r;
    tss += (fit.delta_n[i] - mean) * (fit.delta_n[i] - mean);
  }
  if (weighted) {
    fit.delta_r_se = std::sqrt(1.0 / stt);
  } else {
    const auto dof = static_cast<double>(fit.taus.size() - 1);
    fit.delta_r_se = std::sqrt(rss / dof / stt);
  }
  fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : (rss == 0.0 ? 1.0 : 0.0);
  return fit;
}

double optimal_quench_time(double c, double beta, double delta_r) {
  if (!(delta_r > 0.0)) {
    throw Error(ErrorKind::NoMinimum, "delta_r = " + fmt_real(delta_r) +
                                          ": defect density decreases monotonically, no optimum");
  }
  if (!(c > 0.0) || !(beta > 0.0)) throw Error(ErrorKind::Domain, "c and beta must be positive");
  return std::pow(beta * c / delta_r, 1.0 / (1.0 + beta));
}

AlphaFit fit_alpha(const std::vector<ScalingPoint>& points) {
  if (points.size() < 3) throw Error(ErrorKind::InsufficientData, "alpha fit needs at least 3 points");
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (!(p.w2 > 0.0) || !(p.tau_opt > 0.0)) {
      throw Error(ErrorKind::NonPositive, "alpha fit needs positive W^2 and tau_opt");
    }
    x.push_back(std::log(p.w2));
    y.push_back(std::log(p.tau_opt));
  }
  const LinearFit lf = linear_fit(x, y, {});
  return {lf.slope, std::sqrt(lf.var_slope), lf.intercept, lf.residuals};
}

double baseline_floor_rate(const std::vector<DefectRecord>& baseline) {
  const auto sorted = sorted_by_tau(baseline);
  if (sorted.size() < 3) return 0.0;
  std::vector<double> x, y;
  for (std::size_t i = sorted.size() - 3; i < sorted.size(); ++i) {
    x.push_back(sorted[i].tau);
    y.push_back(sorted[i].nw);
  }
  return std::max(0.0, linear_fit(x, y, {}).slope);
}

ProtocolFit fit_pipeline(const std::vector<DefectRecord>& records, std::optional<Protocol> protocol,
                         const PipelineOptions& options) {
  ProtocolFit out;
  out.protocol = protocol;
  out.options = options;

  std::vector<DefectRecord> baseline;
  std::map<double, std::vector<DefectRecord>> noisy;
  for (const auto& r : records) {
    if (r.w2 == 0.0) {
      baseline.push_back(r);
    } else {
      noisy[r.w2].push_back(r);
    }
  }
  if (baseline.empty()) throw Error(ErrorKind::MissingBaseline, "no W^2 = 0 records to serve as baseline");
  baseline = sorted_by_tau(baseline);
  {
    std::vector<double> taus;
    for (const auto& r : baseline) taus.push_back(r.tau);
    if (distinct_count(taus) < 4) {
      throw Error(ErrorKind::InsufficientData, "baseline needs at least 4 distinct tau values");
    }
  }

  out.r0 = baseline_floor_rate(baseline);
  std::vector<DefectRecord> window;
  for (const auto& r : baseline) {
    const bool in_range = r.tau >= options.kz_tau_min && r.tau <= options.kz_tau_max;
    if (in_range && r.nw >= options.floor_factor * out.r0 * r.tau) {
      window.push_back(r);
      out.kz_taus.push_back(r.tau);
    }
  }
  out.kz = fit_kz_exponent(window);

  auto in_noise_window = [&](const DefectRecord& r) {
    return r.tau >= options.noise_tau_min && r.tau <= options.noise_tau_max;
  };
  std::vector<DefectRecord> base_window;
  std::copy_if(baseline.begin(), baseline.end(), std::back_inserter(base_window), in_noise_window);

  for (auto& [w2, level] : noisy) {
    std::vector<DefectRecord> level_window;
    std::copy_if(level.begin(), level.end(), std::back_inserter(level_window), in_noise_window);
    // The baseline may extend past the noisy grid; pair on the noisy tau values.
    std::vector<DefectRecord> paired;
    for (const auto& r : level_window) {
      auto it = std::find_if(base_window.begin(), base_window.end(), [&](const DefectRecord& b) {
        return std::abs(b.tau - r.tau) <= 1e-12 * std::abs(r.tau);
      });
      if (it == base_window.end()) {
        throw Error(ErrorKind::GridMismatch, "no baseline record at tau = " + fmt_real(r.tau));
      }
      paired.push_back(*it);
    }
    NoiseLevelFit nl;
    nl.rate = fit_noise_rate(sorted_by_tau(level_window), sorted_by_tau(paired));
    try {
      const double t = optimal_quench_time(out.kz.c, out.kz.beta, nl.rate.delta_r);
      nl.tau_opt = t;
      // Delta-method error on ln tau_opt, parameters taken as independent.
      const double b1 = 1.0 + out.kz.beta;
      const double d_lnc = 1.0 / b1;
      const double d_lnr = -1.0 / b1;
      const double d_beta = 1.0 / (out.kz.beta * b1) - std::log(t) / b1;
      const double var_ln = std::pow(d_lnc * out.kz.c_se / out.kz.c, 2) +
                            std::pow(d_lnr * nl.rate.delta_r_se / nl.rate.delta_r, 2) +
                            std::pow(d_beta * out.kz.beta_se, 2);
      nl.tau_opt_se = t * std::sqrt(var_ln);
      out.points.push_back({w2, t});
    } catch (const Error& e) {
      nl.note = e.what();
    }
    out.levels.push_back(std::move(nl));
  }
  if (out.points.size() >= 3) out.alpha = fit_alpha(out.points);
  return out;
}

std::string fits_to_json(const std::vector<ProtocolFit>& fits) {
  using nlohmann::json;
  json root;
  root["protocols"] = json::array();
  for (const ProtocolFit& f : fits) {
    json j;
    j["protocol"] = f.protocol ? json(std::string(protocol_name(*f.protocol))) : json(nullptr);
    j["c"] = f.kz.c;
    j["c_se"] = f.kz.c_se;
    j["beta"] = f.kz.beta;
    j["beta_se"] = f.kz.beta_se;
    j["r0"] = f.r0;
    j["kz_window_tau"] = f.kz_taus;
    j["kz_residuals"] = f.kz.residuals;
    j["kz_residual_norm"] = f.kz.residual_norm;
    j["floor_factor"] = f.options.floor_factor;
    j["kz_tau_min"] = f.options.kz_tau_min;
    j["kz_tau_max"] = std::isfinite(f.options.kz_tau_max) ? json(f.options.kz_tau_max) : json(nullptr);
    j["noise_tau_min"] = f.options.noise_tau_min;
    j["noise_tau_max"] = std::isfinite(f.options.noise_tau_max) ? json(f.options.noise_tau_max) : json(nullptr);
    json levels = json::array();
    for (const auto& nl : f.levels) {
      json l;
      l["w2"] = nl.rate.w2;
      l["delta_r"] = nl.rate.delta_r;
      l["delta_r_se"] = nl.rate.delta_r_se;
      l["r_squared"] = nl.rate.r_squared;
      l["tau"] = nl.rate.taus;
      l["delta_n"] = nl.rate.delta_n;
      l["residuals"] = nl.rate.residuals;
      l["tau_opt"] = nl.tau_opt ? json(*nl.tau_opt) : json(nullptr);
      l["tau_opt_se"] = nl.tau_opt_se;
      if (!nl.note.empty()) l["note"] = nl.note;
      levels.push_back(std::move(l));
    }
    j["levels"] = std::move(levels);
    if (f.alpha) {
      j["alpha"] = f.alpha->alpha;
      j["alpha_se"] = f.alpha->alpha_se;
      j["alpha_residuals"] = f.alpha->residuals;
    } else {
      j["alpha"] = nullptr;
      j["alpha_se"] = nullptr;
    }
    j["theory_beta"] = f.protocol ? json(theory_beta(*f.protocol)) : json(nullptr);
    j["theory_alpha"] = f.protocol ? json(theory_alpha(*f.protocol)) : json(nullptr);
    root["protocols"].push_back(std::move(j));
  }
  return root.dump(2);
}

void write_fits_json(const std::filesystem::path& path, const std::vector<ProtocolFit>& fits) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  out << fits_to_json(fits) << '\n';
}

void write_scaling_csv(const std::filesystem::path& path, const ProtocolFit& fit) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  out << "ln_w2,ln_tau_opt\n";
  for (const auto& p : fit.points) {
    out << fmt_real(std::log(p.w2)) << ',' << fmt_real(std::log(p.tau_opt)) << '\n';
  }
}

}  // namespace antikz
