#include "antikz/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "antikz/error.hpp"
#include "csv.hpp"
#include "format.hpp"

namespace antikz {

namespace {

void require_increasing(const std::vector<double>& v, const char* field, bool allow_zero) {
  if (v.empty()) throw Error(ErrorKind::Config, std::string(field) + " must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || (allow_zero ? v[i] < 0.0 : v[i] <= 0.0)) {
      throw Error(ErrorKind::Config, std::string(field) + " contains an invalid value");
    }
    if (i > 0 && !(v[i] > v[i - 1])) {
      throw Error(ErrorKind::Config, std::string(field) + " must be strictly increasing");
    }
  }
}

}  // namespace

void SweepPlan::validate() const {
  require_increasing(tau_list, "tau_list", false);
  require_increasing(w2_list, "w2_list", true);
  if (!baseline_tau_list.empty()) {
    require_increasing(baseline_tau_list, "baseline_tau_list", false);
    if (w2_list.front() != 0.0) throw Error(ErrorKind::Config, "baseline_tau_list needs 0 in w2_list");
  }
  if (n_k < 2) throw Error(ErrorKind::Config, "n_k must be at least 2");
  if (n_realizations == 0) throw Error(ErrorKind::Config, "n_realizations must be positive");
  if (!(intensity_scale > 0.0) || !std::isfinite(intensity_scale)) {
    throw Error(ErrorKind::Config, "intensity_scale must be positive");
  }
  try {
    ProtocolSpec p = protocol;
    p.tau = tau_list.front();
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, std::string("protocol: ") + e.what());
  }
}

std::vector<double> k_grid(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::Domain, "k grid needs at least one mode");
  std::vector<double> ks(n);
  for (std::size_t j = 0; j < n; ++j) {
    ks[j] = (static_cast<double>(j) + 0.5) * std::numbers::pi / static_cast<double>(n);
  }
  return ks;
}

double plan_max_gap(const ProtocolSpec& protocol, const std::vector<double>& ks) {
  double g = 0.0;
  for (double k : ks) g = std::max(g, max_gap(protocol, k));
  return g;
}

ModeResult run_mode(const ProtocolSpec& protocol, double k, double intensity,
                    std::size_t n_realizations, std::uint64_t master_seed, StreamKey base,
                    std::size_t n_steps) {
  const double dt = protocol.tau / static_cast<double>(n_steps);
  const EvolutionConfig cfg{dt, false};
  const QubitState ground = prepare_ground_state(protocol, k);

  if (intensity == 0.0) {
    const auto noise = silent_realization(dt, n_steps);
    const QubitState out = propagate(ground, protocol, k, noise, cfg);
    return {excitation_probability(out, protocol, k), 0.0, 1};
  }

  NoiseRealization noise = silent_realization(dt, n_steps);
  NoiseSpec spec{intensity, dt, n_steps, base};
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t r = 0; r < n_realizations; ++r) {
    spec.key.realization = r;
    sample_into(spec, master_seed, noise.samples);
    const QubitState out = propagate(ground, protocol, k, noise, cfg);
    const double p = excitation_probability(out, protocol, k);
    const double delta = p - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (p - mean);
  }
  const auto n = static_cast<double>(n_realizations);
  const double se = n_realizations > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
  return {mean, se, n_realizations};
}

DefectRecord defect_density(const PkTable& table, double tau, double w2) {
  double sum = 0.0;
  double var = 0.0;
  std::size_t count = 0;
  for (const PkRow& row : table.rows) {
    if (row.tau != tau || row.w2 != w2) continue;
    sum += row.pk_mean;
    var += row.pk_se * row.pk_se;
    ++count;
  }
  if (count == 0 || count != table.n_k) {
    throw Error(ErrorKind::MissingMode, "table holds " + std::to_string(count) + " of " +
                                            std::to_string(table.n_k) + " modes for tau = " +
                                            fmt_real(tau) + ", w2 = " + fmt_real(w2));
  }
  const auto n = static_cast<double>(count);
  return {tau, w2, sum / n, std::sqrt(var) / n};
}

SweepResult run_sweep(const SweepPlan& plan, const SweepOptions& options) {
  plan.validate();
  const std::vector<double> ks = k_grid(plan.n_k);

  SweepResult result;
  result.table.n_k = plan.n_k;
  result.taus = plan.tau_list;
  for (double tau : plan.baseline_tau_list) {
    if (std::find(result.taus.begin(), result.taus.end(), tau) == result.taus.end()) result.taus.push_back(tau);
  }
  std::sort(result.taus.begin(), result.taus.end());
  std::vector<std::size_t> steps_per_tau;
  for (double tau : result.taus) {
    ProtocolSpec p = plan.protocol;
    p.tau = tau;
    const double gap = plan_max_gap(p, ks);
    const std::size_t n = plan.step.steps_for(tau, gap);
    const double dt = tau / static_cast<double>(n);
    plan.step.check(dt, gap);
    result.max_gap = std::max(result.max_gap, gap);
    steps_per_tau.push_back(n);
    result.dt_per_tau.push_back(dt);
  }

  // tau_index counts into result.taus; key_tau is the tau_list position used
  // for the noise stream, so baseline-only values never shift noisy streams.
  struct Cell {
    std::size_t tau_index, key_tau, w_index, k_index;
  };
  std::vector<Cell> cells;
  std::vector<std::pair<double, double>> records;
  for (std::size_t ti = 0; ti < result.taus.size(); ++ti) {
    const auto pos = std::find(plan.tau_list.begin(), plan.tau_list.end(), result.taus[ti]);
    const bool noisy = pos != plan.tau_list.end();
    const std::size_t key_tau = noisy ? static_cast<std::size_t>(pos - plan.tau_list.begin()) : plan.tau_list.size() + ti;
    for (std::size_t wi = 0; wi < plan.w2_list.size(); ++wi) {
      if (!noisy && plan.w2_list[wi] != 0.0) continue;
      records.emplace_back(result.taus[ti], plan.w2_list[wi]);
      for (std::size_t ki = 0; ki < ks.size(); ++ki) cells.push_back({ti, key_tau, wi, ki});
    }
  }

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  result.table.rows.resize(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      ProtocolSpec p = plan.protocol;
      p.tau = result.taus[c.tau_index];
      const double w2 = plan.w2_list[c.w_index];
      const double k = ks[c.k_index];
      const StreamKey key{static_cast<std::uint64_t>(p.id), c.k_index, c.key_tau, c.w_index, 0};
      PkRow& row = result.table.rows[i];
      row.k = k;
      row.tau = p.tau;
      row.w2 = w2;
      try {
        const ModeResult m = run_mode(p, k, w2 * plan.intensity_scale, plan.n_realizations,
                                      plan.master_seed, key, steps_per_tau[c.tau_index]);
        row.pk_mean = m.mean;
        row.pk_se = m.se;
        row.n_real = m.n_real;
      } catch (const std::exception& e) {
        row.pk_mean = nan;
        row.pk_se = nan;
        row.n_real = 0;
        errors[i] = e.what();
      }
      const std::size_t d = ++done;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(d, cells.size());
      }
    }
  };

  unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(cells.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i].empty()) {
      const PkRow& row = result.table.rows[i];
      result.failures.push_back({row.k, row.tau, row.w2, errors[i]});
    }
  }
  for (const auto& [tau, w2] : records) result.defects.push_back(defect_density(result.table, tau, w2));
  return result;
}

void write_pk_table(const std::filesystem::path& path, const PkTable& table) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  out << "k,tau,w2,pk_mean,pk_se,n_real\n";
  for (const PkRow& r : table.rows) {
    out << fmt_real(r.k) << ',' << fmt_real(r.tau) << ',' << fmt_real(r.w2) << ','
        << fmt_real(r.pk_mean) << ',' << fmt_real(r.pk_se) << ',' << r.n_real << '\n';
  }
}

PkTable read_pk_table(const std::filesystem::path& path) {
  const CsvData csv = read_csv(path, {"k", "tau", "w2", "pk_mean", "pk_se", "n_real"});
  PkTable table;
  std::vector<double> distinct_k;
  for (const auto& f : csv.rows) {
    table.rows.push_back({f[0], f[1], f[2], f[3], f[4], static_cast<std::size_t>(f[5])});
    if (std::find(distinct_k.begin(), distinct_k.end(), f[0]) == distinct_k.end()) {
      distinct_k.push_back(f[0]);
    }
  }
  table.n_k = distinct_k.size();
  return table;
}

void write_nw_table(const std::filesystem::path& path, const std::vector<DefectRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string());
  out << "tau,w2,nw,nw_se\n";
  for (const DefectRecord& r : records) {
    out << fmt_real(r.tau) << ',' << fmt_real(r.w2) << ',' << fmt_real(r.nw) << ','
        << fmt_real(r.nw_se) << '\n';
  }
}

std::vector<DefectRecord> read_nw_table(const std::filesystem::path& path) {
  const CsvData csv = read_csv(path, {"tau", "w2", "nw", "nw_se"});
  std::vector<DefectRecord> out;
  for (const auto& f : csv.rows) out.push_back({f[0], f[1], f[2], f[3]});
  return out;
}

}  // namespace antikz
