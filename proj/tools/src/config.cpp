#include "config.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <variant>

#include "antikz/error.hpp"
#include "antikz/noise.hpp"

namespace antikz::cli {

namespace {

using Value = std::variant<std::string, double, std::uint64_t, std::vector<double>>;

enum class Kind { Text, Integer, Real, RealList };

const std::map<std::string, Kind, std::less<>>& schema() {
  static const std::map<std::string, Kind, std::less<>> s{
      {"protocol", Kind::Text},
      {"n_k", Kind::Integer},
      {"tau_list", Kind::RealList},
      {"baseline_tau_list", Kind::RealList},
      {"w2_list", Kind::RealList},
      {"fm_deviation_khz_list", Kind::RealList},
      {"am_depth_list", Kind::RealList},
      {"n_realizations", Kind::Integer},
      {"master_seed", Kind::Integer},
      {"intensity_scale", Kind::Real},
      {"dt", Kind::Real},
      {"dt_stability", Kind::Real},
      {"dt_bandwidth", Kind::Real},
      {"jx", Kind::Real},
      {"jy", Kind::Real},
      {"h", Kind::Real},
      {"j", Kind::Real},
      {"ramp_start", Kind::Real},
      {"ramp_end", Kind::Real},
      {"fit_floor_factor", Kind::Real},
      {"fit_kz_tau_min", Kind::Real},
      {"fit_kz_tau_max", Kind::Real},
      {"fit_noise_tau_min", Kind::Real},
      {"fit_noise_tau_max", Kind::Real},
      {"output_dir", Kind::Text},
  };
  return s;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> to_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

Value parse_value(std::string_view key, std::string_view raw, Kind kind, int line) {
  auto fail = [&](std::string_view what) {
    return ConfigError(fmt::format("line {}: {}: {}", line, key, what));
  };
  switch (kind) {
    case Kind::Text: {
      if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') raw = raw.substr(1, raw.size() - 2);
      if (raw.empty()) throw fail("empty value");
      return std::string(raw);
    }
    case Kind::Integer: {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (ec != std::errc{} || ptr != raw.data() + raw.size()) throw fail("expected a non-negative integer");
      return v;
    }
    case Kind::Real: {
      const auto v = to_number(raw);
      if (!v) throw fail(fmt::format("'{}' is not a number", raw));
      return *v;
    }
    case Kind::RealList: {
      if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') throw fail("expected [a, b, ...]");
      std::vector<double> out;
      std::string_view body = trim(raw.substr(1, raw.size() - 2));
      while (!body.empty()) {
        const auto comma = body.find(',');
        const auto item = trim(body.substr(0, comma));
        const auto v = to_number(item);
        if (!v) throw fail(fmt::format("'{}' is not a number", item));
        out.push_back(*v);
        if (comma == std::string_view::npos) break;
        body = trim(body.substr(comma + 1));
        if (body.empty()) throw fail("trailing comma");
      }
      return out;
    }
  }
  throw fail("unsupported value");
}

}  // namespace

std::string noise_input_key(NoiseInput n) {
  switch (n) {
    case NoiseInput::W2: return "w2_list";
    case NoiseInput::FmDeviationKhz: return "fm_deviation_khz_list";
    case NoiseInput::AmDepth: return "am_depth_list";
  }
  return "w2_list";
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, Value, std::less<>> values;
  std::istringstream in(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    std::string_view line = raw_line;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("line {}: expected key = value", line_no));
    const std::string key(trim(line.substr(0, eq)));
    const auto it = schema().find(key);
    if (it == schema().end()) throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
    if (values.contains(key)) throw ConfigError(fmt::format("line {}: duplicate key '{}'", line_no, key));
    values[key] = parse_value(key, trim(line.substr(eq + 1)), it->second, line_no);
  }

  auto text_of = [&](std::string_view k) -> const std::string* {
    auto it = values.find(k);
    return it == values.end() ? nullptr : &std::get<std::string>(it->second);
  };
  auto real_of = [&](std::string_view k) -> std::optional<double> {
    auto it = values.find(k);
    if (it == values.end()) return std::nullopt;
    return std::get<double>(it->second);
  };
  auto int_of = [&](std::string_view k) -> std::optional<std::uint64_t> {
    auto it = values.find(k);
    if (it == values.end()) return std::nullopt;
    return std::get<std::uint64_t>(it->second);
  };
  auto list_of = [&](std::string_view k) -> const std::vector<double>* {
    auto it = values.find(k);
    return it == values.end() ? nullptr : &std::get<std::vector<double>>(it->second);
  };

  RunConfig cfg;
  const std::string* proto_name = text_of("protocol");
  if (!proto_name) throw ConfigError("missing required key 'protocol'");
  const auto proto = parse_protocol(*proto_name);
  if (!proto) {
    throw ConfigError(fmt::format("protocol: '{}' is not one of transverse, multicritical, gapless", *proto_name));
  }
  SweepPlan& plan = cfg.plan;
  plan.protocol = make_protocol(*proto, 1.0);
  if (auto v = real_of("jx")) plan.protocol.jx = *v;
  if (auto v = real_of("jy")) plan.protocol.jy = *v;
  if (auto v = real_of("h")) plan.protocol.h = *v;
  if (auto v = real_of("j")) plan.protocol.j = *v;
  if (auto v = real_of("ramp_start")) plan.protocol.ramp.start = *v;
  if (auto v = real_of("ramp_end")) plan.protocol.ramp.end = *v;

  if (auto v = int_of("n_k")) plan.n_k = static_cast<std::size_t>(*v);
  if (auto v = int_of("n_realizations")) plan.n_realizations = static_cast<std::size_t>(*v);
  if (auto v = int_of("master_seed")) plan.master_seed = *v;
  if (auto v = real_of("intensity_scale")) plan.intensity_scale = *v;
  if (auto v = real_of("dt")) plan.step.fixed_dt = *v;
  if (auto v = real_of("dt_stability")) plan.step.stability = *v;
  if (auto v = real_of("dt_bandwidth")) plan.step.bandwidth = *v;

  const auto* taus = list_of("tau_list");
  if (!taus) throw ConfigError("missing required key 'tau_list'");
  plan.tau_list = *taus;
  if (const auto* extra = list_of("baseline_tau_list")) plan.baseline_tau_list = *extra;

  int noise_keys = 0;
  for (NoiseInput n : {NoiseInput::W2, NoiseInput::FmDeviationKhz, NoiseInput::AmDepth}) {
    if (const auto* list = list_of(noise_input_key(n))) {
      ++noise_keys;
      cfg.noise_input = n;
      cfg.noise_values = *list;
    }
  }
  if (noise_keys != 1) {
    throw ConfigError("exactly one of w2_list, fm_deviation_khz_list, am_depth_list is required");
  }
  try {
    for (double v : cfg.noise_values) {
      switch (cfg.noise_input) {
        case NoiseInput::W2: plan.w2_list.push_back(v); break;
        case NoiseInput::FmDeviationKhz:
          plan.w2_list.push_back(modulation_to_intensity({ModulationChannel::FM, v, 0.0}));
          break;
        case NoiseInput::AmDepth:
          plan.w2_list.push_back(modulation_to_intensity({ModulationChannel::AM, 0.0, v}));
          break;
      }
    }
  } catch (const Error& e) {
    throw ConfigError(fmt::format("{}: {}", noise_input_key(cfg.noise_input), e.what()));
  }

  if (auto v = real_of("fit_floor_factor")) cfg.fit.floor_factor = *v;
  if (auto v = real_of("fit_kz_tau_min")) cfg.fit.kz_tau_min = *v;
  if (auto v = real_of("fit_kz_tau_max")) cfg.fit.kz_tau_max = *v;
  if (auto v = real_of("fit_noise_tau_min")) cfg.fit.noise_tau_min = *v;
  if (auto v = real_of("fit_noise_tau_max")) cfg.fit.noise_tau_max = *v;
  if (!(cfg.fit.floor_factor >= 0.0)) throw ConfigError("fit_floor_factor must be >= 0");
  if (const auto* out = text_of("output_dir")) cfg.output_dir = *out;

  try {
    plan.validate();
  } catch (const Error& e) {
    std::string msg = e.what();
    // Modulation input: name the key the user actually wrote.
    if (cfg.noise_input != NoiseInput::W2 && msg.starts_with("w2_list")) {
      msg = noise_input_key(cfg.noise_input) + msg.substr(7);
    }
    throw ConfigError(msg);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace antikz::cli
