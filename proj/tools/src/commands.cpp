#include "commands.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <nlohmann/json.hpp>
#include <thread>

#include "antikz/error.hpp"
#include "antikz/scaling.hpp"
#include "antikz/sweep.hpp"
#include "antikz/version.hpp"
#include "config.hpp"

namespace antikz::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_stamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  if (const char* env = std::getenv("ANTIKZ_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

json json_real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json manifest_json(const RunConfig& cfg, const SweepResult& res, const std::string& config_path,
                   double elapsed_s, unsigned threads) {
  const SweepPlan& plan = cfg.plan;
  const ProtocolSpec& p = plan.protocol;
  json m;
  m["antikz_version"] = kVersion;
  m["created_utc"] = utc_stamp();
  m["config_file"] = config_path;
  m["protocol"] = std::string(protocol_name(p.id));
  m["couplings"] = {{"jx", p.jx}, {"jy", p.jy}, {"h", p.h}, {"j", p.j},
                    {"ramp_start", p.ramp.start}, {"ramp_end", p.ramp.end}};
  m["n_k"] = plan.n_k;
  m["tau_list"] = plan.tau_list;
  m["baseline_tau_list"] = plan.baseline_tau_list;
  m["w2_list"] = plan.w2_list;
  m["noise_input"] = {{"key", noise_input_key(cfg.noise_input)}, {"values", cfg.noise_values}};
  m["intensity_scale"] = plan.intensity_scale;
  m["n_realizations"] = plan.n_realizations;
  m["master_seed"] = plan.master_seed;
  m["step_policy"] = {{"stability", plan.step.stability},
                      {"bandwidth", plan.step.bandwidth},
                      {"fixed_dt", plan.step.fixed_dt}};
  m["simulated_taus"] = res.taus;
  m["dt_per_tau"] = res.dt_per_tau;
  m["max_gap"] = res.max_gap;
  m["fit"] = {{"floor_factor", cfg.fit.floor_factor},
              {"kz_tau_min", cfg.fit.kz_tau_min},
              {"kz_tau_max", json_real(cfg.fit.kz_tau_max)},
              {"noise_tau_min", cfg.fit.noise_tau_min},
              {"noise_tau_max", json_real(cfg.fit.noise_tau_max)}};
  json failures = json::array();
  for (const auto& f : res.failures) {
    failures.push_back({{"k", f.k}, {"tau", f.tau}, {"w2", f.w2}, {"message", f.message}});
  }
  m["failures"] = std::move(failures);
  m["threads"] = threads;
  m["elapsed_seconds"] = elapsed_s;
  return m;
}

std::optional<json> read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  return json::parse(in);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

std::string fmt_opt(const json& v, const char* spec = "{:.4f}") {
  return v.is_number() ? fmt::format(fmt::runtime(spec), v.get<double>()) : std::string("-");
}

}  // namespace

fs::path make_run_dir(const fs::path& base, const std::string& protocol, bool force) {
  if (force) {
    fs::create_directories(base);
    return base;
  }
  fs::create_directories(base);
  const std::string stem = protocol + "_" + utc_stamp();
  for (int n = 0;; ++n) {
    const fs::path dir = base / (n == 0 ? stem : fmt::format("{}_{}", stem, n));
    // create_directory returns false if it already existed: never reuse one.
    if (fs::create_directory(dir)) return dir;
  }
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err, fs::path* run_dir) {
  RunConfig cfg;
  try {
    cfg = load_config(opt.config);
    if (opt.seed) cfg.plan.master_seed = *opt.seed;
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfig;
  }
  const unsigned threads = resolve_threads(opt.threads);
  const fs::path base = opt.out.value_or(cfg.output_dir);

  SweepOptions sweep_opt;
  sweep_opt.threads = threads;
  if (opt.progress) {
    sweep_opt.progress = [&err, last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
      const std::size_t pct = 100 * done / total;
      if (pct >= last + 5 || done == total) {
        last = pct;
        fmt::print(err, "\rsimulate: {}/{} cells ({}%)", done, total, pct);
        if (done == total) fmt::print(err, "\n");
        err.flush();
      }
    };
  }

  SweepResult res;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    res = run_sweep(cfg.plan, sweep_opt);
  } catch (const Error& e) {
    fmt::print(err, "compute error ({}): {}\n", to_string(e.kind()), e.what());
    return kExitCompute;
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::path dir;
  try {
    dir = make_run_dir(base, std::string(protocol_name(cfg.plan.protocol.id)), opt.force);
    write_pk_table(dir / "pk_table.csv", res.table);
    write_nw_table(dir / "nw_table.csv", res.defects);
    write_text(dir / "manifest.json",
               manifest_json(cfg, res, opt.config.string(), elapsed, threads).dump(2) + "\n");
  } catch (const std::exception& e) {
    fmt::print(err, "output error: {}\n", e.what());
    return kExitCompute;
  }
  if (run_dir) *run_dir = dir;
  fmt::print(out, "{}\n", dir.string());

  if (!res.failures.empty()) {
    for (const auto& f : res.failures) {
      fmt::print(err, "cell failed: k={:.6g} tau={:.6g} w2={:.6g}: {}\n", f.k, f.tau, f.w2, f.message);
    }
    return kExitCompute;
  }
  return kExitOk;
}

int cmd_fit(const fs::path& dir, std::ostream& out, std::ostream& err) {
  std::optional<Protocol> protocol;
  PipelineOptions options;
  try {
    if (const auto m = read_json(dir / "manifest.json")) {
      protocol = parse_protocol(m->value("protocol", ""));
      if (m->contains("fit")) {
        const json& f = m->at("fit");
        options.floor_factor = f.value("floor_factor", options.floor_factor);
        options.kz_tau_min = f.value("kz_tau_min", options.kz_tau_min);
        options.noise_tau_min = f.value("noise_tau_min", options.noise_tau_min);
        // null means unbounded
        if (f.contains("kz_tau_max") && f.at("kz_tau_max").is_number()) {
          options.kz_tau_max = f.at("kz_tau_max").get<double>();
        }
        if (f.contains("noise_tau_max") && f.at("noise_tau_max").is_number()) {
          options.noise_tau_max = f.at("noise_tau_max").get<double>();
        }
      }
    }
  } catch (const json::exception& e) {
    fmt::print(err, "fit error: unreadable manifest.json: {}\n", e.what());
    return kExitFit;
  }

  ProtocolFit fit;
  try {
    std::vector<DefectRecord> records;
    for (const auto& r : read_nw_table(dir / "nw_table.csv")) {
      if (std::isfinite(r.nw) && std::isfinite(r.nw_se)) {
        records.push_back(r);
      } else {
        fmt::print(err, "skipping non-finite record tau={} w2={}\n", r.tau, r.w2);
      }
    }
    fit = fit_pipeline(records, protocol, options);
    write_fits_json(dir / "fits.json", {fit});
    write_scaling_csv(dir / "scaling.csv", fit);
  } catch (const Error& e) {
    fmt::print(err, "fit error ({}): {}\n", to_string(e.kind()), e.what());
    return kExitFit;
  }

  const std::string name = protocol ? std::string(protocol_name(*protocol)) : "unknown";
  fmt::print(out, "{:<14} {:>8} {:>8} {:>8} {:>9} {:>8} {:>9}\n", "protocol", "beta", "beta_se", "alpha",
             "alpha_se", "theory", "levels");
  const std::string alpha = fit.alpha ? fmt::format("{:.4f}", fit.alpha->alpha) : "-";
  const std::string alpha_se = fit.alpha ? fmt::format("{:.4f}", fit.alpha->alpha_se) : "-";
  const std::string theory = protocol ? fmt::format("{:.4f}", theory_alpha(*protocol)) : "-";
  fmt::print(out, "{:<14} {:>8.4f} {:>8.4f} {:>8} {:>9} {:>8} {:>9}\n", name, fit.kz.beta, fit.kz.beta_se, alpha,
             alpha_se, theory, fmt::format("{}/{}", fit.points.size(), fit.levels.size()));
  for (const auto& l : fit.levels) {
    if (!l.note.empty()) fmt::print(err, "W^2 = {}: {}\n", l.rate.w2, l.note);
  }
  return kExitOk;
}

int cmd_report(const std::vector<fs::path>& dirs, const std::optional<fs::path>& out_file, std::ostream& out,
               std::ostream& err) {
  std::string md = "# antikz fit report\n\n";
  md += "| run | protocol | beta | beta theory | alpha | alpha theory | levels |\n";
  md += "|---|---|---|---|---|---|---|\n";
  std::string details;
  for (const auto& dir : dirs) {
    std::optional<json> fits;
    try {
      fits = read_json(dir / "fits.json");
    } catch (const json::exception& e) {
      fmt::print(err, "report: {}: {}\n", (dir / "fits.json").string(), e.what());
      return kExitFit;
    }
    if (!fits) {
      fmt::print(err, "report: {} has no fits.json (run `antikz fit` first)\n", dir.string());
      return kExitFit;
    }
    for (const json& p : fits->at("protocols")) {
      const std::string name = p.at("protocol").is_string() ? p.at("protocol").get<std::string>() : "unknown";
      const auto& levels = p.at("levels");
      std::size_t with_opt = 0;
      for (const auto& l : levels) with_opt += l.at("tau_opt").is_number();
      md += fmt::format("| {} | {} | {} ± {} | {} | {} ± {} | {} | {}/{} |\n", dir.filename().string(), name,
                        fmt_opt(p.at("beta")), fmt_opt(p.at("beta_se")), fmt_opt(p.value("theory_beta", json())),
                        fmt_opt(p.at("alpha")), fmt_opt(p.at("alpha_se")), fmt_opt(p.at("theory_alpha")),
                        with_opt, levels.size());
      details += fmt::format("\n## {} ({})\n\n", name, dir.string());
      details += "| W^2 | delta_r | R^2 | tau_opt |\n|---|---|---|---|\n";
      for (const auto& l : levels) {
        details += fmt::format("| {} | {} ± {} | {} | {} ± {} |\n", l.at("w2").get<double>(),
                               fmt_opt(l.at("delta_r"), "{:.4g}"), fmt_opt(l.at("delta_r_se"), "{:.2g}"),
                               fmt_opt(l.at("r_squared")), fmt_opt(l.at("tau_opt"), "{:.3g}"),
                               fmt_opt(l.at("tau_opt_se"), "{:.2g}"));
      }
    }
  }
  md += details;
  if (out_file) {
    try {
      write_text(*out_file, md);
    } catch (const Error& e) {
      fmt::print(err, "report: {}\n", e.what());
      return kExitFit;
    }
  } else {
    out << md;
  }
  return kExitOk;
}

}  // namespace antikz::cli
