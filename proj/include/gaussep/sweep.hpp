#pragma once

// Parameter sweeps over the model families: resolved configuration, tabular
// results and CSV/JSON writers. Used by the gaussep_sweep tool.

#include "gaussep/models.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace gaussep {

struct GridSpec {
  double min = 0.0;
  double max = 1.0;
  int count = 2;

  double at(int i) const {
    if (i == count - 1) return max;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
  }

  std::vector<double> values() const {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = at(i);
    return v;
  }
};

enum class OutputFormat { Csv, Json };

struct SweepConfig {
  // squeezed reservoir
  double kappa = 2.0;
  double epsilon = 1.0;
  double r = 0.5;
  double phi = kPi;
  // memory family
  double gamma = 1.0;
  double r_mem = 0.3;
  double nu = 1.0;
  double t = 1.0;
  double eps_buf = 1e-3;
  double s = 0.5;
  double alpha = 1.0;

  GridSpec delta_grid{-2.0, 2.0, 101};
  GridSpec kappa_grid{0.5, 5.0, 46};
  GridSpec r_grid{0.0, 1.5, 31};
  GridSpec phi_grid{0.0, 2.0 * kPi, 361};
  GridSpec lambda_grid{-2.0, 2.0, 41};
  GridSpec omega_grid{-2.0, 2.0, 41};
  GridSpec branch_grid{-2.0, 2.0, 40};

  std::string axis = "kappa";         // kappa | r | phi
  std::string branch = "both";        // plus | minus | both
  std::string diffusion = "iso";      // iso | aniso | drift-aligned
  OutputFormat format = OutputFormat::Csv;
  std::string out;                    // empty: stdout
  std::uint64_t seed = 42;
  std::string fault;                  // verify only: stein | lyapunov | gauge
  double ep_tol = 1e-12;              // EP marker gate, relative to the drift scale
  int threads = 0;                    // 0: hardware concurrency

  void validate() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string normalize_key(std::string key) {
  key = trim(key);
  while (!key.empty() && key.front() == '-') key.erase(key.begin());
  for (auto& c : key)
    if (c == '-') c = '_';
  return key;
}

inline double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "pi") return kPi;
  if (v == "2pi") return 2.0 * kPi;
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidParameter, "bad number for " + key + ": '" + value + "'");
  }
}

inline GridSpec parse_grid(const std::string& key, const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 3)
    throw Error(ErrorKind::InvalidParameter, key + " expects min,max,count");
  GridSpec g;
  g.min = parse_double(key, parts[0]);
  g.max = parse_double(key, parts[1]);
  const double c = parse_double(key, parts[2]);
  if (c != std::floor(c) || c > 1e7)
    throw Error(ErrorKind::InvalidParameter, key + " count must be an integer");
  g.count = static_cast<int>(c);
  return g;
}

inline std::string grid_string(const GridSpec& g) {
  return format_double(g.min) + "," + format_double(g.max) + "," + std::to_string(g.count);
}

inline void require_choice(const std::string& key, const std::string& v,
                           std::initializer_list<const char*> choices) {
  for (const char* c : choices)
    if (v == c) return;
  throw Error(ErrorKind::InvalidParameter, "bad value for " + key + ": '" + v + "'");
}

}  // namespace detail

// Sets one configuration key (dashes and underscores are interchangeable).
inline void apply_setting(SweepConfig& c, const std::string& raw_key, const std::string& raw_value) {
  using namespace detail;
  const std::string key = normalize_key(raw_key);
  const std::string value = trim(raw_value);
  std::map<std::string, double*> scalars = {
      {"kappa", &c.kappa}, {"epsilon", &c.epsilon}, {"r", &c.r},         {"phi", &c.phi},
      {"gamma", &c.gamma}, {"r_mem", &c.r_mem},     {"nu", &c.nu},       {"t", &c.t},
      {"eps_buf", &c.eps_buf}, {"s", &c.s},         {"alpha", &c.alpha}, {"ep_tol", &c.ep_tol}};
  std::map<std::string, GridSpec*> grids = {
      {"delta_grid", &c.delta_grid},   {"kappa_grid", &c.kappa_grid}, {"r_grid", &c.r_grid},
      {"phi_grid", &c.phi_grid},       {"lambda_grid", &c.lambda_grid},
      {"omega_grid", &c.omega_grid},   {"branch_grid", &c.branch_grid}};
  if (auto it = scalars.find(key); it != scalars.end()) {
    *it->second = parse_double(key, value);
  } else if (auto g = grids.find(key); g != grids.end()) {
    *g->second = parse_grid(key, value);
  } else if (key == "axis") {
    require_choice(key, value, {"kappa", "r", "phi"});
    c.axis = value;
  } else if (key == "branch") {
    require_choice(key, value, {"plus", "minus", "both"});
    c.branch = value;
  } else if (key == "diffusion") {
    require_choice(key, value, {"iso", "aniso", "drift-aligned"});
    c.diffusion = value;
  } else if (key == "format") {
    require_choice(key, value, {"csv", "json"});
    c.format = value == "csv" ? OutputFormat::Csv : OutputFormat::Json;
  } else if (key == "out") {
    c.out = value;
  } else if (key == "fault") {
    require_choice(key, value, {"", "stein", "lyapunov", "gauge"});
    c.fault = value;
  } else if (key == "seed") {
    const double d = parse_double(key, value);
    if (d < 0 || d != std::floor(d)) throw Error(ErrorKind::InvalidParameter, "seed must be a nonnegative integer");
    c.seed = static_cast<std::uint64_t>(d);
  } else if (key == "threads") {
    const double d = parse_double(key, value);
    if (d < 0 || d != std::floor(d) || d > 1024) throw Error(ErrorKind::InvalidParameter, "bad thread count");
    c.threads = static_cast<int>(d);
  } else {
    throw Error(ErrorKind::InvalidParameter, "unknown configuration key '" + raw_key + "'");
  }
}

// Line-based `key = value`; '#' starts a comment.
inline void apply_config_text(SweepConfig& c, const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::InvalidParameter, "config line " + std::to_string(lineno) + " has no '='");
    apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
  }
}

inline void apply_config_file(SweepConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidParameter, "cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(c, buf.str());
}

inline void SweepConfig::validate() const {
  auto check_grid = [](const char* name, const GridSpec& g) {
    if (g.count < 2) throw Error(ErrorKind::InvalidParameter, std::string(name) + " needs count >= 2");
    if (!(g.min < g.max)) throw Error(ErrorKind::InvalidParameter, std::string(name) + " needs min < max");
  };
  check_grid("delta_grid", delta_grid);
  check_grid("kappa_grid", kappa_grid);
  check_grid("r_grid", r_grid);
  check_grid("phi_grid", phi_grid);
  check_grid("lambda_grid", lambda_grid);
  check_grid("omega_grid", omega_grid);
  check_grid("branch_grid", branch_grid);
  if (!(kappa > 0.0)) throw Error(ErrorKind::InvalidParameter, "kappa must be positive");
  if (!(kappa_grid.min > 0.0)) throw Error(ErrorKind::InvalidParameter, "kappa grid must be positive");
  if (!(r >= 0.0) || !(r_grid.min >= 0.0))
    throw Error(ErrorKind::InvalidParameter, "squeezing must be >= 0");
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidParameter, "t must be positive");
  if (!(ep_tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "ep_tol must be positive");
  NmFamilyParams p;
  p.gamma = gamma;
  p.r_mem = r_mem;
  p.nu = nu;
  p.eps_buf = eps_buf;
  p.diffusion = DiffusionModel{DiffusionKind::DriftAligned, s, alpha};
  if (diffusion != "drift-aligned") p.diffusion.kind = DiffusionKind::Isotropic;
  p.validate();
}

// Key/value listing of the resolved configuration, in a fixed order.
inline std::vector<std::pair<std::string, std::string>> config_entries(const SweepConfig& c) {
  using detail::grid_string;
  return {{"kappa", format_double(c.kappa)},
          {"epsilon", format_double(c.epsilon)},
          {"r", format_double(c.r)},
          {"phi", format_double(c.phi)},
          {"gamma", format_double(c.gamma)},
          {"r_mem", format_double(c.r_mem)},
          {"nu", format_double(c.nu)},
          {"t", format_double(c.t)},
          {"eps_buf", format_double(c.eps_buf)},
          {"s", format_double(c.s)},
          {"alpha", format_double(c.alpha)},
          {"delta_grid", grid_string(c.delta_grid)},
          {"kappa_grid", grid_string(c.kappa_grid)},
          {"r_grid", grid_string(c.r_grid)},
          {"phi_grid", grid_string(c.phi_grid)},
          {"lambda_grid", grid_string(c.lambda_grid)},
          {"omega_grid", grid_string(c.omega_grid)},
          {"branch_grid", grid_string(c.branch_grid)},
          {"axis", c.axis},
          {"branch", c.branch},
          {"diffusion", c.diffusion},
          {"seed", std::to_string(c.seed)},
          {"ep_tol", format_double(c.ep_tol)}};
}

struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> meta;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw Error(ErrorKind::InvalidParameter, "no column named " + name);
  }
};

inline void write_csv(const SweepTable& table, std::ostream& os) {
  for (const auto& [k, v] : table.meta) os << "# " << k << " = " << v << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << "\n";
  }
}

inline nlohmann::ordered_json table_json(const SweepTable& table) {
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.meta) meta[k] = v;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (std::isfinite(row[i]))
        r[table.columns[i]] = row[i];
      else
        r[table.columns[i]] = nullptr;
    }
    rows.push_back(std::move(r));
  }
  return {{"meta", meta}, {"rows", rows}};
}

inline void write_json(const SweepTable& table, std::ostream& os) {
  os << table_json(table).dump(2) << "\n";
}

inline void write_table(const SweepTable& table, OutputFormat format, std::ostream& os) {
  if (format == OutputFormat::Csv)
    write_csv(table, os);
  else
    write_json(table, os);
}

// Evaluates fn(i) for i in [0, n) on worker threads; results land in index order.
template <class Row>
std::vector<Row> parallel_rows(std::size_t n, const std::function<Row(std::size_t)>& fn,
                               int threads = 0) {
  std::vector<Row> out(n);
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

namespace detail {

inline SweepTable base_table(const SweepConfig& c, const std::string& command,
                             std::vector<std::string> columns) {
  SweepTable t;
  t.columns = std::move(columns);
  t.meta.push_back({"toolkit", std::string("gaussep ") + kVersion});
  t.meta.push_back({"command", command});
  for (auto& kv : config_entries(c)) t.meta.push_back(kv);
  t.meta.push_back({"psd_tolerance", "1e-10*(1+max|M|)"});
  t.meta.push_back({"equation_tolerance", "1e-10*(1+max|rhs|)"});
  return t;
}

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline DiffusionModel diffusion_from(const SweepConfig& c) {
  if (c.diffusion == "aniso") return DiffusionModel::anisotropic(c.s);
  if (c.diffusion == "drift-aligned") return DiffusionModel::drift_aligned(c.alpha);
  return DiffusionModel::isotropic();
}

inline NmFamilyParams nm_params(const SweepConfig& c, double lambda, double omega) {
  NmFamilyParams p;
  p.lambda = lambda;
  p.omega = omega;
  p.gamma = c.gamma;
  p.r_mem = c.r_mem;
  p.nu = c.nu;
  p.eps_buf = c.eps_buf;
  p.diffusion = diffusion_from(c);
  return p;
}

inline std::vector<Branch> branches_from(const SweepConfig& c) {
  if (c.branch == "plus") return {Branch::Plus};
  if (c.branch == "minus") return {Branch::Minus};
  return {Branch::Plus, Branch::Minus};
}

inline double branch_sign(Branch b) { return b == Branch::Plus ? 1.0 : -1.0; }

}  // namespace detail

// Drift eigenvalues of the squeezed-reservoir mode across detuning.
inline SweepTable cmd_drift_eigs(const SweepConfig& c) {
  c.validate();
  SweepTable t = detail::base_table(
      c, "drift-eigs", {"delta", "re_lambda_plus", "re_lambda_minus", "im_lambda_plus",
                        "im_lambda_minus", "gap", "ep"});
  const auto grid = c.delta_grid.values();
  t.rows = parallel_rows<std::vector<double>>(
      grid.size(),
      [&](std::size_t i) {
        const double delta = grid[i];
        const JordanReport j = jordan_structure(squeezed_drift(c.kappa, delta, c.epsilon), c.ep_tol);
        const Complex lp = j.eigenvalues.front(), lm = j.eigenvalues.back();
        return std::vector<double>{delta,       lp.real(),         lm.real(),
                                   lp.imag(),   lm.imag(),         j.coalescence_gap,
                                   j.defective ? 1.0 : 0.0};
      },
      c.threads);
  return t;
}

// Lyapunov gauge eigenvalues on the squeezed EP branches along one axis.
inline SweepTable cmd_squeezed_gauge(const SweepConfig& c) {
  c.validate();
  SweepTable t = detail::base_table(c, "squeezed-gauge",
                                    {c.axis, "branch", "lambda1", "lambda2", "trace", "s_qq",
                                     "s_qp", "s_pp", "residual"});
  const GridSpec& g = c.axis == "kappa" ? c.kappa_grid : c.axis == "r" ? c.r_grid : c.phi_grid;
  const auto grid = g.values();
  const auto branches = detail::branches_from(c);
  const std::size_t n = grid.size() * branches.size();
  t.rows = parallel_rows<std::vector<double>>(
      n,
      [&](std::size_t k) {
        const Branch b = branches[k / grid.size()];
        const double x = grid[k % grid.size()];
        SqueezedReservoirParams p{c.kappa, c.epsilon, c.epsilon, c.r, c.phi};
        if (c.axis == "kappa") p.kappa = x;
        if (c.axis == "r") p.r = x;
        if (c.axis == "phi") p.phi = x;
        const GaugeCovariance S = squeezed_ep_gauge(p, b);
        const Vector ev = symmetric_eigenvalues(S.S);
        return std::vector<double>{x, detail::branch_sign(b), ev(0), ev(1), S.S.trace(),
                                   S.S(0, 0), S.S(0, 1), S.S(1, 1), S.residual};
      },
      c.threads);
  return t;
}

struct NmPoint {
  double lambda_min = detail::kNaN;
  double lambda_max = detail::kNaN;
  double s11 = detail::kNaN, s12 = detail::kNaN, s22 = detail::kNaN;
  double cp_margin = detail::kNaN;
  bool defective = false;
  bool unstable = false;
  bool degenerate = false;
};

// One point of the memory-family surface; overlay points use the Jordan closed form.
inline NmPoint nm_point(const SweepConfig& c, double lambda, double omega, bool jordan) {
  NmPoint out;
  const NmFamilyParams p = detail::nm_params(c, lambda, omega);
  GaussianChannel ch;
  try {
    ch = nm_channel(p, c.t);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateModel) throw;
    out.degenerate = true;
    return out;
  }
  out.cp_margin = cp_check(ch, CpMethod::DetCondition).margin;
  out.defective = jordan_structure(ch.X).defective;
  if (!(spectral_radius(ch.X) < 1.0)) {
    out.unstable = true;
    out.cp_margin = detail::kNaN;
    return out;
  }
  Matrix S;
  if (jordan) {
    const Branch b = lambda == omega ? Branch::Plus : Branch::Minus;
    S = nm_ep_gauge(p, c.t, b).S;
  } else {
    S = solve_stein(ch.X, ch.Y).S;
  }
  const Vector ev = symmetric_eigenvalues(S);
  out.lambda_min = ev(0);
  out.lambda_max = ev(1);
  out.s11 = S(0, 0);
  out.s12 = S(0, 1);
  out.s22 = S(1, 1);
  return out;
}

// Gauge eigenvalues over the (lambda, omega) plane plus EP-line overlay rows
// (overlay = +1 on lambda = omega, -1 on lambda = -omega, 0 for grid rows).
inline SweepTable cmd_nm_surface(const SweepConfig& c) {
  c.validate();
  SweepTable t = detail::base_table(
      c, "nm-surface", {"lambda", "omega", "lambda_min", "lambda_max", "defective", "cp_margin",
                        "unstable", "degenerate", "overlay"});
  const auto ls = c.lambda_grid.values();
  const auto ws = c.omega_grid.values();
  const std::size_t grid_rows = ls.size() * ws.size();
  const std::size_t n = grid_rows + 2 * ws.size();
  t.rows = parallel_rows<std::vector<double>>(
      n,
      [&](std::size_t k) {
        double lambda, omega, overlay = 0.0;
        if (k < grid_rows) {
          lambda = ls[k / ws.size()];
          omega = ws[k % ws.size()];
        } else {
          const std::size_t j = k - grid_rows;
          omega = ws[j / 2];
          overlay = j % 2 == 0 ? 1.0 : -1.0;
          lambda = overlay * omega;
        }
        const NmPoint pt = nm_point(c, lambda, omega, overlay != 0.0);
        return std::vector<double>{lambda,
                                   omega,
                                   pt.lambda_min,
                                   pt.lambda_max,
                                   pt.defective ? 1.0 : 0.0,
                                   pt.cp_margin,
                                   pt.unstable ? 1.0 : 0.0,
                                   pt.degenerate ? 1.0 : 0.0,
                                   overlay};
      },
      c.threads);
  return t;
}

// Gauge eigenvalues and entries along lambda = +omega (branch +1) and lambda = -omega (-1).
inline SweepTable cmd_nm_branch(const SweepConfig& c) {
  c.validate();
  SweepTable t = detail::base_table(c, "nm-branch",
                                    {"omega", "branch", "lambda1", "lambda2", "s11", "s12", "s22",
                                     "unstable", "degenerate"});
  const auto ws = c.branch_grid.values();
  const std::size_t n = 2 * ws.size();
  t.rows = parallel_rows<std::vector<double>>(
      n,
      [&](std::size_t k) {
        const double omega = ws[k / 2];
        const Branch b = k % 2 == 0 ? Branch::Plus : Branch::Minus;
        const double lambda = detail::branch_sign(b) * omega;
        const NmPoint pt = nm_point(c, lambda, omega, true);
        return std::vector<double>{omega,  detail::branch_sign(b), pt.lambda_min, pt.lambda_max,
                                   pt.s11, pt.s12,                 pt.s22,        pt.unstable ? 1.0 : 0.0,
                                   pt.degenerate ? 1.0 : 0.0};
      },
      c.threads);
  return t;
}

}  // namespace gaussep
