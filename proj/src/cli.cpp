#include "gmext/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmext/asymptotics.hpp"
#include "gmext/coupled_solver.hpp"
#include "gmext/error.hpp"
#include "gmext/model_params.hpp"
#include "gmext/nonexistence_probe.hpp"

namespace gmext {

namespace {

using Json = nlohmann::ordered_json;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "kind",    "N",          "p",         "q",         "m",         "s",
      "k",       "lambda",     "lambda_fraction",       "rho0",      "C1",
      "C2",      "r0",         "R",         "n",         "nodes_per_decade",
      "tol",     "max_iter",   "damping",   "out",       "window_lo", "window_hi",
      "jobs",    "solve",      "p_range",   "q_range",   "m_range",   "s_range",
      "k_range", "R_list",     "csv",       "reference"};
  return keys;
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

std::string format_number(double x) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), x);
  return std::string(buffer, result.ptr);
}

double parse_number(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end || !std::isfinite(value)) {
    throw ConfigError("key '" + key + "': not a number: '" + text + "'");
  }
  return value;
}

class Settings {
 public:
  explicit Settings(Config values) : values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double number(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
    return parse_number(key, it->second);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) values_[key] = format_number(fallback);
    return number(key);
  }

  std::optional<double> optional_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  long integer(const std::string& key, long fallback) {
    const double x = number(key, static_cast<double>(fallback));
    if (x != std::floor(x)) throw ConfigError("key '" + key + "' must be an integer");
    return static_cast<long>(x);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) values_[key] = fallback;
    return values_.at(key);
  }

  bool flag(const std::string& key) {
    const auto value = text(key, "false");
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("key '" + key + "' must be true or false");
  }

  const Config& values() const { return values_; }

 private:
  Config values_;
};

ExponentSet read_params(Settings& cfg) {
  ExponentSet x;
  try {
    x.kind = system_kind_from_string(cfg.text("kind", "GM"));
  } catch (const Error& e) {
    throw ConfigError(std::string("unknown system kind: ") + e.what());
  }
  const long N = cfg.integer("N", 3);
  if (N < 2 || N > 1000) throw ConfigError("N must be an integer >= 2");
  x.N = static_cast<int>(N);
  x.p = cfg.number("p");
  x.q = cfg.number("q");
  x.m = cfg.number("m");
  x.s = cfg.number("s");
  x.k = cfg.number("k");
  x.lambda = cfg.optional_number("lambda").value_or(0.0);
  try {
    x.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return x;
}

SourceEnvelope read_envelope(Settings& cfg, double k) {
  const double rho0 = cfg.number("rho0", 1.0);
  SourceEnvelope env;
  env.rho_amplitude = rho0;
  env.C1 = cfg.number("C1", rho0);
  env.C2 = cfg.number("C2", rho0);
  env.k = k;
  try {
    env.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return env;
}

GridPtr read_grid(Settings& cfg) {
  const double r0 = cfg.number("r0", 1.0);
  const double R = cfg.number("R", 1e6);
  if (!(r0 > 0.0) || !(R > r0)) throw ConfigError("need 0 < r0 < R");
  const long per_decade = cfg.integer("nodes_per_decade", 500);
  const long fallback = static_cast<long>(std::ceil(std::log10(R / r0) * per_decade)) + 1;
  const long n = cfg.integer("n", fallback);
  if (n < 16) throw ConfigError("n must be >= 16");
  return build_grid(r0, R, static_cast<std::size_t>(n));
}

std::size_t read_jobs(Settings& cfg) {
  if (!cfg.has("jobs")) {
    if (const char* env = std::getenv("GM_EXT_JOBS")) cfg.text("jobs", env);
  }
  const long jobs = cfg.integer("jobs", 1);
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  return static_cast<std::size_t>(jobs);
}

Window read_window(Settings& cfg, const RadialGrid& grid) {
  const auto fallback = default_window(grid);
  return {cfg.optional_number("window_lo").value_or(fallback.first),
          cfg.optional_number("window_hi").value_or(fallback.second)};
}

std::string verdict_line(const RegimeVerdict& v) {
  std::string line = std::string(to_string(v.outcome)) + " " + v.matched_condition;
  if (v.u_profile) line += " u~" + v.u_profile->describe();
  if (v.v_profile) line += " v~" + v.v_profile->describe();
  return line;
}

int verdict_exit(const RegimeVerdict& v) {
  if (v.exists()) return exit_code::existence;
  return v.outcome == Outcome::nonexistence ? exit_code::nonexistence : exit_code::inconclusive;
}

Json profile_json(const std::optional<AsymptoticProfile>& p) {
  if (!p) return nullptr;
  return Json{{"kind", to_string(p->kind)},
              {"power", p->power},
              {"log_power", p->log_power},
              {"r0", p->r0},
              {"describe", p->describe()}};
}

Json fit_json(const FitResult& f) {
  return Json{{"power", f.power},           {"log_power", f.log_power},
              {"amplitude", f.amplitude},   {"window", {f.r_lo, f.r_hi}},
              {"rms_residual", f.rms_residual}, {"points", f.points}};
}

struct FieldFit {
  FitResult power;
  std::optional<FitResult> power_log;
  std::string log_error;
};

FieldFit fit_field(const GridFunction& w, const Window& window) {
  FieldFit out{fit_power(w, window), std::nullopt, {}};
  try {
    out.power_log = fit_power_log(w, window, w.grid().r0());
  } catch (const Error& e) {
    out.log_error = e.what();
  }
  return out;
}

// Pure profiles are judged on the power fit, log profiles on the two-regressor fit.
ProfileVerdict judge(const FieldFit& fit, const AsymptoticProfile& predicted) {
  const bool use_log = predicted.log_power != 0.0 && fit.power_log;
  return compare_profile(use_log ? *fit.power_log : fit.power, predicted, 0.05, 0.1);
}

Json field_json(const FieldFit& fit, const std::optional<AsymptoticProfile>& predicted) {
  Json j{{"power_fit", fit_json(fit.power)}};
  j["power_log_fit"] = fit.power_log ? fit_json(*fit.power_log) : Json(nullptr);
  if (!fit.log_error.empty()) j["power_log_error"] = fit.log_error;
  if (predicted) {
    const auto verdict = judge(fit, *predicted);
    j["compare"] = Json{{"predicted", predicted->describe()},
                        {"pass", verdict.pass},
                        {"power_error", verdict.power_error},
                        {"log_error", verdict.log_error}};
  }
  return j;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  file << content;
}

// ---------------------------------------------------------------- classify

int cmd_classify(Settings& cfg, std::ostream& out) {
  const auto params = read_params(cfg);
  const auto verdict = classify(params, cfg.number("r0", 1.0));
  out << verdict_line(verdict) << "\n";
  return verdict_exit(verdict);
}

// ---------------------------------------------------------------- solve

int cmd_solve(Settings& cfg, std::ostream& out, std::ostream& err) {
  const auto params = read_params(cfg);
  const auto env = read_envelope(cfg, params.k);
  auto grid = read_grid(cfg);
  const auto verdict = classify(params, grid->r0());
  if (!verdict.exists()) {
    err << verdict_line(verdict) << ": no existence theorem applies; "
        << "use the probe subcommand for numerical corroboration\n";
    return verdict_exit(verdict);
  }
  CoupledOptions options;
  if (!cfg.has("lambda")) options.lambda_fraction = cfg.number("lambda_fraction", 0.5);
  options.tol = cfg.number("tol", options.tol);
  options.max_iter = static_cast<std::size_t>(cfg.integer("max_iter", 500));
  options.damping = cfg.number("damping", options.damping);
  const std::string prefix = cfg.text("out", "run");
  const auto window = read_window(cfg, *grid);

  const auto solution = solve_system(params, env, grid, options);
  const auto& pb = solution.problem;
  const auto& state = solution.state;
  const auto box = verify_box(state, pb.schedule, *pb.verdict.u_profile, *pb.verdict.v_profile, window);
  const auto fu = fit_field(state.u, window);
  const auto fv = fit_field(state.v, window);

  const auto res = nodewise_residuals(state, pb);
  std::ostringstream csv;
  csv << "r,u,v,residual_u,residual_v\n";
  for (std::size_t i = 0; i < grid->size(); ++i) {
    csv << format_number(grid->r(i)) << ',' << format_number(state.u[i]) << ','
        << format_number(state.v[i]) << ',' << format_number(res.u[i]) << ','
        << format_number(res.v[i]) << '\n';
  }
  write_text(prefix + ".csv", csv.str());

  const auto& c = pb.schedule;
  const auto& cal = pb.calibration;
  Json manifest;
  manifest["command"] = "solve";
  manifest["config"] = cfg.values();
  manifest["params"] = Json{{"kind", to_string(pb.params.kind)},
                            {"N", pb.params.N},
                            {"p", pb.params.p},
                            {"q", pb.params.q},
                            {"m", pb.params.m},
                            {"s", pb.params.s},
                            {"k", pb.params.k},
                            {"lambda", pb.params.lambda}};
  manifest["source"] = Json{{"rho0", env.rho_amplitude}, {"C1", env.C1}, {"C2", env.C2}};
  manifest["grid"] = Json{{"r0", grid->r0()}, {"R", grid->outer()}, {"n", grid->size()}};
  manifest["tolerances"] = Json{{"tol", options.tol},
                                {"max_iter", options.max_iter},
                                {"damping", options.damping},
                                {"inner_tol", options.inner_tol},
                                {"calibration_widening", options.calibration_widening}};
  manifest["verdict"] = Json{{"outcome", to_string(pb.verdict.outcome)},
                             {"condition", pb.verdict.matched_condition},
                             {"u_profile", profile_json(pb.verdict.u_profile)},
                             {"v_profile", profile_json(pb.verdict.v_profile)}};
  manifest["calibration"] = Json{{"inhibitor_min", cal.inhibitor_min},
                                 {"inhibitor_max", cal.inhibitor_max},
                                 {"source_min", cal.source_min},
                                 {"source_max", cal.source_max},
                                 {"coupled_max", cal.coupled_max}};
  manifest["schedule"] = Json{{"C3", c.C3}, {"C4", c.C4}, {"C5", c.C5}, {"C6", c.C6},
                              {"D", c.D},   {"E", c.E},   {"F", c.F},   {"G", c.G},
                              {"lambda_star", c.lambda_star}, {"threshold", c.threshold()}};
  manifest["iterations"] = state.iteration;
  manifest["residuals"] = Json{{"u", state.residual_u}, {"v", state.residual_v}};
  manifest["window"] = {window.first, window.second};
  manifest["fits"] = Json{{"u", field_json(fu, pb.verdict.u_profile)},
                          {"v", field_json(fv, pb.verdict.v_profile)}};
  Json violations = Json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(box.violations.size(), 20); ++i) {
    const auto& v = box.violations[i];
    violations.push_back(Json{{"r", v.r}, {"bound", v.bound}, {"margin", v.margin}});
  }
  manifest["box"] = Json{{"holds", box.holds()},
                         {"checked_nodes", box.checked_nodes},
                         {"violation_count", box.violations.size()},
                         {"margin_u_lower", box.margin_u_lower},
                         {"margin_u_upper", box.margin_u_upper},
                         {"margin_v_lower", box.margin_v_lower},
                         {"margin_v_upper", box.margin_v_upper},
                         {"violations", violations}};

  if (cfg.has("reference")) {
    const auto path = cfg.text("reference", "");
    std::ifstream file(path);
    if (!file) throw ConfigError("cannot read reference manifest " + path);
    Json prior;
    try {
      prior = Json::parse(file);
    } catch (const Json::exception& e) {
      throw ConfigError("reference manifest " + path + ": " + e.what());
    }
    const double pu = prior["fits"]["u"]["power_fit"]["power"].get<double>();
    const double pv = prior["fits"]["v"]["power_fit"]["power"].get<double>();
    const double du = std::abs(fu.power.power - pu);
    const double dv = std::abs(fv.power.power - pv);
    manifest["truncation_stability"] = Json{{"reference", path},
                                            {"reference_R", prior["grid"]["R"]},
                                            {"delta_u_power", du},
                                            {"delta_v_power", dv},
                                            {"stable", std::max(du, dv) < 0.01}};
  }
  write_text(prefix + ".json", manifest.dump(2) + "\n");

  out << verdict_line(pb.verdict) << "\n";
  out << "lambda=" << format_number(pb.params.lambda)
      << " threshold=" << format_number(c.threshold()) << " iterations=" << state.iteration
      << " residual_u=" << format_number(state.residual_u)
      << " residual_v=" << format_number(state.residual_v) << "\n";
  out << "u power=" << format_number(fu.power.power) << " v power=" << format_number(fv.power.power)
      << " box=" << (box.holds() ? "holds" : "violated") << "\n";
  out << "wrote " << prefix << ".csv " << prefix << ".json\n";
  return 0;
}

// ---------------------------------------------------------------- sweep

std::vector<double> read_range(Settings& cfg, const std::string& name, double fixed) {
  const std::string key = name + "_range";
  if (!cfg.has(key)) return {fixed};
  const auto spec = cfg.text(key, "");
  std::vector<std::string> parts;
  std::stringstream stream(spec);
  for (std::string part; std::getline(stream, part, ':');) parts.push_back(trim(part));
  if (parts.size() != 3) throw ConfigError("key '" + key + "' must be lo:hi:count");
  const double lo = parse_number(key, parts[0]);
  const double hi = parse_number(key, parts[1]);
  const double count = parse_number(key, parts[2]);
  if (count < 0 || count != std::floor(count)) throw ConfigError("key '" + key + "': bad count");
  std::vector<double> values;
  const auto n = static_cast<std::size_t>(count);
  for (std::size_t i = 0; i < n; ++i) {
    values.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return values;
}

struct Cell {
  ExponentSet params;
  std::string row;
};

std::string csv_field(std::string text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

int cmd_sweep(Settings& cfg, std::ostream& out) {
  const std::string kind = cfg.text("kind", "GM");
  ExponentSet base;
  try {
    base.kind = system_kind_from_string(kind);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const long N = cfg.integer("N", 3);
  if (N < 2) throw ConfigError("N must be >= 2");
  base.N = static_cast<int>(N);
  auto fixed = [&](const std::string& key) {
    return cfg.has(key + "_range") ? 0.0 : cfg.number(key);
  };
  const auto ps = read_range(cfg, "p", fixed("p"));
  const auto qs = read_range(cfg, "q", fixed("q"));
  const auto ms = read_range(cfg, "m", fixed("m"));
  const auto ss = read_range(cfg, "s", fixed("s"));
  const auto ks = read_range(cfg, "k", fixed("k"));
  const bool solve = cfg.flag("solve");
  const std::size_t jobs = read_jobs(cfg);

  std::vector<Cell> cells;
  for (double p : ps)
    for (double q : qs)
      for (double m : ms)
        for (double s : ss)
          for (double k : ks) {
            ExponentSet x = base;
            x.p = p;
            x.q = q;
            x.m = m;
            x.s = s;
            x.k = k;
            x.lambda = cfg.optional_number("lambda").value_or(0.0);
            cells.push_back({x, {}});
          }

  GridPtr grid;
  CoupledOptions options;
  std::optional<SourceEnvelope> env_template;
  if (solve && !cells.empty()) {
    grid = read_grid(cfg);
    if (!cfg.has("lambda")) options.lambda_fraction = cfg.number("lambda_fraction", 0.5);
    options.tol = cfg.number("tol", options.tol);
    options.max_iter = static_cast<std::size_t>(cfg.integer("max_iter", 500));
    options.damping = cfg.number("damping", options.damping);
    env_template = read_envelope(cfg, 1.0);
  }

  auto evaluate = [&](Cell& cell) {
    const auto& x = cell.params;
    std::vector<std::string> f = {std::to_string(x.N), std::string(to_string(x.kind)),
                                  format_number(x.p), format_number(x.q), format_number(x.m),
                                  format_number(x.s), format_number(x.k)};
    std::string error;
    std::string outcome, condition, u_kind, v_kind, u_pow, u_log, v_pow, v_log, fit_u, fit_v;
    try {
      const auto verdict = classify(x, 1.0);
      outcome = to_string(verdict.outcome);
      condition = verdict.matched_condition;
      if (verdict.u_profile) {
        u_kind = to_string(verdict.u_profile->kind);
        u_pow = format_number(verdict.u_profile->power);
        u_log = format_number(verdict.u_profile->log_power);
      }
      if (verdict.v_profile) {
        v_kind = to_string(verdict.v_profile->kind);
        v_pow = format_number(verdict.v_profile->power);
        v_log = format_number(verdict.v_profile->log_power);
      }
      if (solve && verdict.exists()) {
        SourceEnvelope env = *env_template;
        env.k = x.k;
        const auto sol = solve_system(x, env, grid, options);
        const auto window = default_window(*grid);
        fit_u = format_number(fit_power(sol.state.u, window).power);
        fit_v = format_number(fit_power(sol.state.v, window).power);
      }
    } catch (const std::exception& e) {
      error = e.what();
    }
    for (auto* s : {&outcome, &condition, &u_kind, &u_pow, &u_log, &v_kind, &v_pow, &v_log, &fit_u,
                    &fit_v, &error}) {
      f.push_back(csv_field(*s));
    }
    std::string row;
    for (std::size_t i = 0; i < f.size(); ++i) row += (i ? "," : "") + f[i];
    cell.row = row;
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) evaluate(cells[i]);
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(jobs, cells.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream atlas;
  atlas << "N,kind,p,q,m,s,k,outcome,condition,u_profile,u_power,u_log_power,v_profile,v_power,"
           "v_log_power,fit_u_power,fit_v_power,error\n";
  for (const auto& cell : cells) atlas << cell.row << "\n";
  if (cfg.has("out")) {
    write_text(cfg.text("out", ""), atlas.str());
  } else {
    out << atlas.str();
  }
  return 0;
}

// ---------------------------------------------------------------- fit

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

Table read_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw CsvError("cannot read " + path);
  Table table;
  std::string line;
  if (!std::getline(file, line)) throw CsvError(path + ": empty file");
  {
    std::stringstream stream(line);
    for (std::string cell; std::getline(stream, cell, ',');) table.header.push_back(trim(cell));
  }
  if (table.header.empty() || table.header[0] != "r") throw CsvError(path + ": first column must be r");
  std::set<std::string> seen(table.header.begin(), table.header.end());
  if (seen.size() != table.header.size()) throw CsvError(path + ": duplicate column names");
  table.columns.resize(table.header.size());
  std::size_t line_no = 1;
  while (std::getline(file, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::stringstream stream(line);
    std::size_t col = 0;
    for (std::string cell; std::getline(stream, cell, ','); ++col) {
      if (col >= table.columns.size()) throw CsvError(path + ":" + std::to_string(line_no) + ": too many fields");
      const auto text = trim(cell);
      double value = 0.0;
      const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
      if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
        throw CsvError(path + ":" + std::to_string(line_no) + ": bad number '" + text + "'");
      }
      table.columns[col].push_back(value);
    }
    if (col != table.columns.size()) throw CsvError(path + ":" + std::to_string(line_no) + ": too few fields");
  }
  if (table.columns[0].size() < 16) throw CsvError(path + ": fewer than 16 rows");
  return table;
}

int cmd_fit(Settings& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.has("csv")) throw ConfigError("fit needs --csv");
  const auto table = read_csv(cfg.text("csv", ""));
  const auto& r = table.columns[0];
  GridPtr grid;
  try {
    grid = build_grid(r.front(), r.back(), r.size());
  } catch (const Error& e) {
    throw CsvError(std::string("r column: ") + e.what());
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (std::abs(grid->r(i) - r[i]) > 1e-9 * r[i]) {
      throw CsvError("r column is not log-uniform at row " + std::to_string(i + 2));
    }
  }
  const auto window = read_window(cfg, *grid);
  if (window_touches_boundary_layer(*grid, window)) {
    err << "warning: window [" << format_number(window.first) << ", " << format_number(window.second)
        << "] reaches into the inner or outer boundary layer; exponents may be contaminated\n";
  }
  std::optional<RegimeVerdict> verdict;
  if (cfg.has("p")) verdict = classify(read_params(cfg), grid->r0());

  for (std::size_t c = 1; c < table.header.size(); ++c) {
    const auto& name = table.header[c];
    if (name.rfind("residual", 0) == 0) continue;
    const GridFunction w(grid, table.columns[c]);
    const auto fit = fit_field(w, window);
    out << name << " power=" << format_number(fit.power.power)
        << " amplitude=" << format_number(fit.power.amplitude)
        << " rms=" << format_number(fit.power.rms_residual) << " window=["
        << format_number(fit.power.r_lo) << ", " << format_number(fit.power.r_hi) << "]";
    if (fit.power_log) {
      out << " | log-fit power=" << format_number(fit.power_log->power)
          << " log_power=" << format_number(fit.power_log->log_power);
    } else {
      out << " | log-fit unavailable: " << fit.log_error;
    }
    out << "\n";
    if (verdict) {
      const std::optional<AsymptoticProfile>& predicted =
          name == "u" ? verdict->u_profile : (name == "v" ? verdict->v_profile : std::nullopt);
      if (predicted) {
        const auto v = judge(fit, *predicted);
        out << name << " vs " << predicted->describe() << ": " << (v.pass ? "PASS" : "FAIL")
            << " (power error " << format_number(v.power_error) << ", log error "
            << format_number(v.log_error) << ")\n";
      }
    }
  }
  return 0;
}

// ---------------------------------------------------------------- probe

int cmd_probe(Settings& cfg, std::ostream& out) {
  const auto params = read_params(cfg);
  ProbeOptions options;
  options.r0 = cfg.number("r0", 1.0);
  options.nodes_per_decade = static_cast<std::size_t>(cfg.integer("nodes_per_decade", 200));
  options.jobs = read_jobs(cfg);
  std::vector<double> Rs;
  {
    std::stringstream stream(cfg.text("R_list", "1e2,1e3,1e4"));
    for (std::string part; std::getline(stream, part, ',');) Rs.push_back(parse_number("R_list", trim(part)));
  }
  const auto report = degeneration_probe(params, Rs, options);
  out << report.summary() << "\n";
  if (report.supported) {
    out << "R,nodes,floor,peak,normalized_floor,status\n";
    for (const auto& row : report.rows) {
      out << format_number(row.R) << ',' << row.nodes << ',' << format_number(row.floor) << ','
          << format_number(row.peak) << ',' << format_number(row.normalized_floor) << ','
          << row.status << "\n";
    }
  }
  return 0;
}

}  // namespace

Config parse_config(std::istream& in) {
  Config config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (value.empty()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    }
    config[key] = value;
  }
  return config;
}

Config load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::invalid_argument("cannot read config file " + path);
  try {
    return parse_config(file);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steady Gierer-Meinhardt systems on exterior radial domains"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app;
    std::string config_path;
    std::string manifest_path;
    std::map<std::string, std::string> overrides;
  };
  std::vector<std::unique_ptr<Sub>> subs;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"classify", "Report the theorem that decides an exponent set"},
      {"solve", "Solve the coupled system and write CSV + JSON manifest"},
      {"sweep", "Classify (and optionally solve) a grid of exponent sets"},
      {"fit", "Fit decay exponents to a solution CSV"},
      {"probe", "Corroborate nonexistence on growing truncations"}};
  for (const auto& [name, help] : commands) {
    auto sub = std::make_unique<Sub>();
    sub->app = app.add_subcommand(name, help);
    sub->app->add_option("--config", sub->config_path, "key = value configuration file");
    if (name == "solve") {
      sub->app->add_option("--manifest", sub->manifest_path, "re-run the configuration of a manifest");
    }
    for (const auto& key : known_keys()) sub->app->add_option("--" + key, sub->overrides[key]);
    subs.push_back(std::move(sub));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code::bad_config;
  }

  for (const auto& sub : subs) {
    if (!sub->app->parsed()) continue;
    const std::string name = sub->app->get_name();
    try {
      Config config;
      if (!sub->manifest_path.empty()) {
        std::ifstream file(sub->manifest_path);
        if (!file) throw ConfigError("cannot read manifest " + sub->manifest_path);
        Json manifest;
        try {
          manifest = Json::parse(file);
          for (const auto& [key, value] : manifest.at("config").items()) {
            config[key] = value.get<std::string>();
          }
        } catch (const Json::exception& e) {
          throw ConfigError("manifest " + sub->manifest_path + ": " + e.what());
        }
      }
      if (!sub->config_path.empty()) {
        try {
          for (const auto& [key, value] : load_config(sub->config_path)) config[key] = value;
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      for (const auto& [key, value] : sub->overrides) {
        if (sub->app->count("--" + key) > 0) config[key] = value;
      }
      Settings settings(std::move(config));
      if (name == "classify") return cmd_classify(settings, out);
      if (name == "solve") return cmd_solve(settings, out, err);
      if (name == "sweep") return cmd_sweep(settings, out);
      if (name == "fit") return cmd_fit(settings, out, err);
      if (name == "probe") return cmd_probe(settings, out);
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << "\n";
      return exit_code::bad_config;
    } catch (const CsvError& e) {
      err << "csv error: " << e.what() << "\n";
      return exit_code::bad_csv;
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return exit_code::solver_failure;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return exit_code::solver_failure;
    }
  }
  return exit_code::bad_config;
}

}  // namespace gmext
