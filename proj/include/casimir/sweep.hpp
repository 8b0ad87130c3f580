#pragma once

// Parameter sweeps over the separation, with deterministic CSV / JSON output.
// Grid points run on a bounded pool of threads; each result lands in its own
// slot, so the assembled table does not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "casimir/lifshitz.hpp"
#include "casimir/model.hpp"
#include "casimir/observables.hpp"

namespace casimir {

enum class LzScale { LINEAR, LOG };
enum class OutputFormat { CSV, JSON };

inline constexpr std::string_view kQuantities[] = {"energy",         "pressure",  "force",  "coeff_energy",
                                                   "coeff_pressure", "sea_split", "period", "beat"};

struct SweepSpec {
  // List-valued axes produce one configuration per combination.
  std::vector<double> mass{0.0};
  std::vector<double> mu{1.0};
  std::optional<double> mu2;
  double degeneracy = 1.0;
  std::vector<double> temperature{0.0};
  BoundaryKind bc = BoundaryKind::PBC;
  std::vector<int> dim{3};
  double lz_min = 1.0;
  double lz_max = 30.0;
  int lz_points = 600;
  LzScale lz_scale = LzScale::LINEAR;
  std::vector<std::string> quantities{"energy"};
  double area = 1.0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int workers = 1;
  std::string output;  // empty or "-" is stdout
  OutputFormat format = OutputFormat::CSV;

  bool operator==(const SweepSpec&) const = default;
};

struct Configuration {
  double mass = 0.0;
  double mu = 0.0;
  double temperature = 0.0;
  int dim = 3;
};

struct Record {
  std::size_t config = 0;
  double lz = 0.0;
  std::vector<double> values;  // one per requested quantity
  std::vector<double> errors;
  bool converged = true;
  std::string failure;  // empty unless some quantity threw
};

struct SweepTable {
  SweepSpec spec;
  std::vector<Configuration> configs;
  std::vector<Record> rows;  // configuration-major, lz ascending within each

  std::vector<const Record*> failures() const {
    std::vector<const Record*> out;
    for (const auto& r : rows)
      if (!r.converged || !r.failure.empty()) out.push_back(&r);
    return out;
  }
};

inline std::string_view to_string(LzScale s) { return s == LzScale::LOG ? "log" : "linear"; }
inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::JSON ? "json" : "csv"; }

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw Error(Errc::InvalidSweep, key + ": not a number: '" + v + "'");
  return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw Error(Errc::InvalidSweep, key + ": not an integer: '" + v + "'");
  return static_cast<int>(d);
}

inline std::vector<double> parse_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& p : split_list(v)) out.push_back(parse_double(key, p));
  if (out.empty()) throw Error(Errc::InvalidSweep, key + ": empty list");
  return out;
}

}  // namespace detail

/// Applies one setting; keys are the SweepSpec field names.
inline void apply_setting(SweepSpec& s, const std::string& key, const std::string& raw) {
  const std::string v = detail::trim(raw);
  if (key == "mass") {
    s.mass = detail::parse_doubles(key, v);
  } else if (key == "mu") {
    s.mu = detail::parse_doubles(key, v);
  } else if (key == "mu2") {
    if (v.empty() || v == "none")
      s.mu2.reset();
    else
      s.mu2 = detail::parse_double(key, v);
  } else if (key == "degeneracy") {
    s.degeneracy = detail::parse_double(key, v);
  } else if (key == "temperature") {
    s.temperature = detail::parse_doubles(key, v);
  } else if (key == "bc") {
    try {
      s.bc = parse_boundary(v);
    } catch (const std::invalid_argument& e) {
      throw Error(Errc::InvalidSweep, e.what());
    }
  } else if (key == "dim") {
    s.dim.clear();
    for (const auto& p : detail::split_list(v)) s.dim.push_back(detail::parse_int(key, p));
    if (s.dim.empty()) throw Error(Errc::InvalidSweep, "dim: empty list");
  } else if (key == "lz_min") {
    s.lz_min = detail::parse_double(key, v);
  } else if (key == "lz_max") {
    s.lz_max = detail::parse_double(key, v);
  } else if (key == "lz_points") {
    s.lz_points = detail::parse_int(key, v);
  } else if (key == "lz_scale") {
    if (v == "linear")
      s.lz_scale = LzScale::LINEAR;
    else if (v == "log")
      s.lz_scale = LzScale::LOG;
    else
      throw Error(Errc::InvalidSweep, "lz_scale must be linear or log");
  } else if (key == "quantities") {
    s.quantities = detail::split_list(v);
  } else if (key == "area") {
    s.area = detail::parse_double(key, v);
  } else if (key == "rel_tol") {
    s.rel_tol = detail::parse_double(key, v);
  } else if (key == "abs_tol") {
    s.abs_tol = detail::parse_double(key, v);
  } else if (key == "workers") {
    s.workers = detail::parse_int(key, v);
  } else if (key == "output") {
    s.output = v;
  } else if (key == "format") {
    if (v == "csv")
      s.format = OutputFormat::CSV;
    else if (v == "json")
      s.format = OutputFormat::JSON;
    else
      throw Error(Errc::InvalidSweep, "format must be csv or json");
  } else {
    throw Error(Errc::InvalidSweep, "unknown setting '" + key + "'");
  }
}

/// Flat "key = value" lines; '#' starts a comment.
inline void apply_config(SweepSpec& s, std::istream& in) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::InvalidSweep, "line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(s, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

inline void validate(const SweepSpec& s) {
  auto fail = [](const std::string& m) { throw Error(Errc::InvalidSweep, m); };
  if (!(s.lz_min > 0.0) || !(s.lz_min < s.lz_max) || !std::isfinite(s.lz_max)) fail("need 0 < lz_min < lz_max");
  if (s.lz_points < 2) fail("lz_points must be >= 2");
  if (s.workers < 1) fail("workers must be >= 1");
  if (s.quantities.empty()) fail("no quantities requested");
  for (const auto& q : s.quantities) {
    if (std::find(std::begin(kQuantities), std::end(kQuantities), q) == std::end(kQuantities))
      fail("unknown quantity '" + q + "'");
    if (std::count(s.quantities.begin(), s.quantities.end(), q) > 1) fail("quantity '" + q + "' listed twice");
  }
  if (std::count(s.quantities.begin(), s.quantities.end(), "beat") && !s.mu2) fail("beat needs mu2");
  if (s.mass.empty() || s.mu.empty() || s.temperature.empty() || s.dim.empty()) fail("empty parameter list");
  try {
    validate(Tolerances{s.rel_tol, s.abs_tol});
    for (double m : s.mass)
      for (double mu : s.mu) validate(FieldSpec{m, mu, s.degeneracy});
    if (s.mu2)
      for (double m : s.mass) validate(FieldSpec{m, *s.mu2, s.degeneracy});
    for (double t : s.temperature) validate_temperature(t);
    for (int d : s.dim) validate_dimension(d);
  } catch (const Error& e) {
    fail(e.what());
  }
  if (!(s.area > 0.0)) fail("area must be > 0");
}

inline std::vector<double> lz_grid(const SweepSpec& s) {
  std::vector<double> out(static_cast<std::size_t>(s.lz_points));
  const double n = static_cast<double>(s.lz_points - 1);
  for (int i = 0; i < s.lz_points; ++i) {
    const double t = i / n;
    out[i] = s.lz_scale == LzScale::LINEAR ? s.lz_min + (s.lz_max - s.lz_min) * t
                                           : s.lz_min * std::pow(s.lz_max / s.lz_min, t);
  }
  out.back() = s.lz_max;
  return out;
}

inline std::vector<Configuration> configurations(const SweepSpec& s) {
  std::vector<Configuration> out;
  for (double m : s.mass)
    for (double mu : s.mu)
      for (double t : s.temperature)
        for (int d : s.dim) out.push_back({m, mu, t, d});
  return out;
}

namespace detail {

inline Record evaluate_point(const SweepSpec& s, const Configuration& c, double lz) {
  Record rec;
  rec.lz = lz;
  const Tolerances tol{s.rel_tol, s.abs_tol};
  std::vector<FieldSpec> fields{{c.mass, c.mu, s.degeneracy}};
  if (s.mu2) fields.push_back({c.mass, *s.mu2, s.degeneracy});

  std::optional<EvalResult> energy, pressure;
  auto get_energy = [&]() -> const EvalResult& {
    if (!energy) energy = multi_field_energy(fields, s.bc, c.dim, lz, c.temperature, tol);
    return *energy;
  };
  auto get_pressure = [&]() -> const EvalResult& {
    if (!pressure) {
      EvalResult p;
      for (const auto& f : fields) {
        const EvalResult one = casimir_pressure(f, s.bc, c.dim, lz, c.temperature, tol);
        p.value += one.value;
        p.abs_error_estimate = std::hypot(p.abs_error_estimate, one.abs_error_estimate);
        p.evaluations += one.evaluations;
        p.converged = p.converged && one.converged;
      }
      pressure = p;
    }
    return *pressure;
  };

  for (const auto& q : s.quantities) {
    double v = NAN, e = NAN;
    bool ok = true;
    try {
      if (q == "energy") {
        const auto& r = get_energy();
        v = r.value, e = r.abs_error_estimate, ok = r.converged;
      } else if (q == "pressure" || q == "force") {
        const auto& r = get_pressure();
        const double scale = q == "force" ? s.area : 1.0;
        v = scale * r.value, e = scale * r.abs_error_estimate, ok = r.converged;
      } else if (q == "coeff_energy") {
        const auto& r = get_energy();
        const double ld = std::pow(lz, c.dim);
        v = ld * r.value, e = ld * r.abs_error_estimate, ok = r.converged;
      } else if (q == "coeff_pressure") {
        const auto& r = get_pressure();
        const double ld = std::pow(lz, c.dim + 1);
        v = ld * r.value, e = ld * r.abs_error_estimate, ok = r.converged;
      } else if (q == "sea_split") {
        v = 0.0, e = 0.0;
        for (const auto& f : fields) {
          const SeaSplit sp = sea_split(f, s.bc, c.dim, lz, c.temperature, tol);
          v += sp.fermi;
          e = std::hypot(e, sp.fermi_err());
          ok = ok && sp.converged;
        }
      } else if (q == "period") {
        v = predicted_period(fields.front(), s.bc), e = 0.0;
      } else if (q == "beat") {
        const auto b = predicted_beat_period(fields[0], fields[1], s.bc);
        v = b ? *b : INFINITY, e = 0.0;
      }
    } catch (const Error& err) {
      v = NAN, e = NAN, ok = false;
      if (!rec.failure.empty()) rec.failure += "; ";
      rec.failure += q + ": " + err.what();
    }
    rec.values.push_back(v);
    rec.errors.push_back(e);
    rec.converged = rec.converged && ok;
  }
  return rec;
}

}  // namespace detail

inline SweepTable run_sweep(const SweepSpec& spec) {
  validate(spec);
  SweepTable table;
  table.spec = spec;
  table.configs = configurations(spec);
  const std::vector<double> grid = lz_grid(spec);
  const std::size_t n_tasks = table.configs.size() * grid.size();
  table.rows.resize(n_tasks);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n_tasks; i = next++) {
      const std::size_t c = i / grid.size();
      Record r = detail::evaluate_point(spec, table.configs[c], grid[i % grid.size()]);
      r.config = c;
      table.rows[i] = std::move(r);
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(spec.workers), n_tasks);
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  return table;
}

// ---- output -------------------------------------------------------------

/// Plain numeric table: what the CSV writer prints and the reader returns.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

namespace detail {

inline std::string format12(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Parameter axes that vary across configurations get their own column.
inline std::vector<std::string> varying_axes(const SweepSpec& s) {
  std::vector<std::string> out;
  if (s.mass.size() > 1) out.push_back("mass");
  if (s.mu.size() > 1) out.push_back("mu");
  if (s.temperature.size() > 1) out.push_back("temperature");
  if (s.dim.size() > 1) out.push_back("dim");
  return out;
}

inline double axis_value(const Configuration& c, const std::string& axis) {
  if (axis == "mass") return c.mass;
  if (axis == "mu") return c.mu;
  if (axis == "temperature") return c.temperature;
  return c.dim;
}

}  // namespace detail

inline CsvTable to_csv_table(const SweepTable& t) {
  CsvTable out;
  const auto axes = detail::varying_axes(t.spec);
  out.header.push_back("lz");
  for (const auto& a : axes) out.header.push_back(a);
  for (const auto& q : t.spec.quantities) {
    out.header.push_back(q);
    out.header.push_back(q + "_err");
  }
  out.header.push_back("converged");
  for (const auto& r : t.rows) {
    std::vector<double> row{r.lz};
    for (const auto& a : axes) row.push_back(detail::axis_value(t.configs[r.config], a));
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      row.push_back(r.values[i]);
      row.push_back(r.errors[i]);
    }
    row.push_back(r.converged && r.failure.empty() ? 1.0 : 0.0);
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline void write_csv(const CsvTable& t, std::ostream& os) {
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << detail::format12(row[i]);
    os << '\n';
  }
}

inline CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw Error(Errc::IoFailure, "empty CSV input");
  t.header = detail::split_list(line);
  while (std::getline(is, line)) {
    if (detail::trim(line).empty()) continue;
    std::vector<double> row;
    for (const auto& cell : detail::split_list(line)) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != t.header.size()) throw Error(Errc::IoFailure, "CSV row width does not match the header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// Spec echo. The worker count is left out so output does not depend on it.
inline nlohmann::ordered_json to_json(const SweepSpec& s) {
  nlohmann::ordered_json j;
  j["mass"] = s.mass;
  j["mu"] = s.mu;
  j["mu2"] = s.mu2 ? nlohmann::ordered_json(*s.mu2) : nlohmann::ordered_json(nullptr);
  j["degeneracy"] = s.degeneracy;
  j["temperature"] = s.temperature;
  j["bc"] = std::string(to_string(s.bc));
  j["dim"] = s.dim;
  j["lz_min"] = s.lz_min;
  j["lz_max"] = s.lz_max;
  j["lz_points"] = s.lz_points;
  j["lz_scale"] = std::string(to_string(s.lz_scale));
  j["quantities"] = s.quantities;
  j["area"] = s.area;
  j["rel_tol"] = s.rel_tol;
  j["abs_tol"] = s.abs_tol;
  j["output"] = s.output;
  j["format"] = std::string(to_string(s.format));
  return j;
}

inline SweepSpec sweep_spec_from_json(const nlohmann::ordered_json& j) {
  SweepSpec s;
  s.mass = j.at("mass").get<std::vector<double>>();
  s.mu = j.at("mu").get<std::vector<double>>();
  if (!j.at("mu2").is_null()) s.mu2 = j.at("mu2").get<double>();
  s.degeneracy = j.at("degeneracy").get<double>();
  s.temperature = j.at("temperature").get<std::vector<double>>();
  apply_setting(s, "bc", j.at("bc").get<std::string>());
  s.dim = j.at("dim").get<std::vector<int>>();
  s.lz_min = j.at("lz_min").get<double>();
  s.lz_max = j.at("lz_max").get<double>();
  s.lz_points = j.at("lz_points").get<int>();
  apply_setting(s, "lz_scale", j.at("lz_scale").get<std::string>());
  s.quantities = j.at("quantities").get<std::vector<std::string>>();
  s.area = j.at("area").get<double>();
  s.rel_tol = j.at("rel_tol").get<double>();
  s.abs_tol = j.at("abs_tol").get<double>();
  if (j.contains("workers")) s.workers = j.at("workers").get<int>();
  s.output = j.at("output").get<std::string>();
  apply_setting(s, "format", j.at("format").get<std::string>());
  return s;
}

/// Measured period of coeff_energy and, with two fields, the beat period of
/// energy * L^((d+1)/2), per configuration. Unmeasurable entries are null.
inline nlohmann::ordered_json analyse(const SweepTable& t) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  const auto& q = t.spec.quantities;
  const auto col = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = std::find(q.begin(), q.end(), name);
    if (it == q.end()) return std::nullopt;
    return static_cast<std::size_t>(it - q.begin());
  };
  const auto ce = col("coeff_energy");
  const auto en = col("energy");
  for (std::size_t c = 0; c < t.configs.size(); ++c) {
    std::vector<double> lz, coeff, scaled;
    for (const auto& r : t.rows) {
      if (r.config != c) continue;
      lz.push_back(r.lz);
      if (ce) coeff.push_back(r.values[*ce]);
      if (en) scaled.push_back(r.values[*en] * std::pow(r.lz, 0.5 * (t.configs[c].dim + 1)));
    }
    nlohmann::ordered_json a;
    a["mass"] = t.configs[c].mass;
    a["mu"] = t.configs[c].mu;
    a["temperature"] = t.configs[c].temperature;
    a["dim"] = t.configs[c].dim;
    a["measured_period"] = nullptr;
    a["measured_period_err"] = nullptr;
    if (ce) {
      try {
        const auto p = measure_period(lz, coeff);
        a["measured_period"] = p.period;
        a["measured_period_err"] = p.std_error;
      } catch (const Error&) {
      }
    }
    if (t.spec.mu2 && en) {
      a["measured_beat"] = nullptr;
      a["measured_beat_err"] = nullptr;
      try {
        const auto p = measure_beat_period(lz, scaled);
        a["measured_beat"] = p.period;
        a["measured_beat_err"] = p.std_error;
      } catch (const Error&) {
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

inline void write_json(const SweepTable& t, std::ostream& os) {
  nlohmann::ordered_json j;
  j["spec"] = to_json(t.spec);
  auto& records = j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    const auto& c = t.configs[r.config];
    nlohmann::ordered_json rec;
    rec["lz"] = r.lz;
    rec["mass"] = c.mass;
    rec["mu"] = c.mu;
    rec["temperature"] = c.temperature;
    rec["dim"] = c.dim;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      rec[t.spec.quantities[i]] = r.values[i];
      rec[t.spec.quantities[i] + "_err"] = r.errors[i];
    }
    rec["converged"] = r.converged && r.failure.empty();
    if (!r.failure.empty()) rec["failure"] = r.failure;
    records.push_back(std::move(rec));
  }
  j["analysis"] = analyse(t);
  os << j.dump(2) << '\n';
}

inline void emit(const SweepTable& t, OutputFormat format, std::ostream& os) {
  if (t.rows.empty()) throw Error(Errc::IoFailure, "nothing to emit");
  if (format == OutputFormat::CSV)
    write_csv(to_csv_table(t), os);
  else
    write_json(t, os);
  if (!os) throw Error(Errc::IoFailure, "write failed");
}

}  // namespace casimir
