#include "gaussep/sweep.hpp"
#include "gaussep/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

namespace {

using gaussep::SweepConfig;

// Keys a subcommand accepts as --flag VALUE; the value is applied through the
// same path as config-file lines so precedence stays CLI > file > defaults.
const std::vector<std::string> kCommonKeys = {"out", "format", "threads"};
const std::vector<std::string> kSqueezedKeys = {"kappa", "epsilon", "r", "phi", "ep-tol"};
const std::vector<std::string> kMemoryKeys = {"gamma", "r-mem", "nu",    "t",
                                              "eps-buf", "s",   "alpha", "diffusion"};

struct Sub {
  CLI::App* app = nullptr;
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_keys(Sub& sub, const std::vector<std::string>& keys) {
  for (const auto& key : keys) {
    sub.app->add_option_function<std::string>(
        "--" + key, [&sub, key](const std::string& v) { sub.overrides.emplace_back(key, v); },
        "override " + key);
  }
}

Sub& make_sub(CLI::App& app, std::vector<std::unique_ptr<Sub>>& subs, const std::string& name,
              const std::string& help) {
  subs.push_back(std::make_unique<Sub>());
  Sub& s = *subs.back();
  s.app = app.add_subcommand(name, help);
  s.app->add_option("--config", s.config_path, "line-based key = value file");
  add_keys(s, kCommonKeys);
  return s;
}

SweepConfig resolve(const Sub& sub) {
  SweepConfig c;
  if (!sub.config_path.empty()) gaussep::apply_config_file(c, sub.config_path);
  for (const auto& [k, v] : sub.overrides) gaussep::apply_setting(c, k, v);
  c.validate();
  return c;
}

void emit(const SweepConfig& c, const std::function<void(std::ostream&)>& write) {
  if (c.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw gaussep::Error(gaussep::ErrorKind::InvalidParameter, "cannot write " + c.out);
  write(f);
}

int run_verify(const SweepConfig& c) {
  const auto results = gaussep::run_verify({c.seed, c.fault});
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed;
  emit(c, [&](std::ostream& os) {
    if (c.format == gaussep::OutputFormat::Json) {
      nlohmann::ordered_json j;
      j["meta"] = {{"toolkit", std::string("gaussep ") + gaussep::kVersion},
                   {"seed", c.seed},
                   {"fault", c.fault}};
      j["suites"] = nlohmann::ordered_json::array();
      for (const auto& r : results)
        j["suites"].push_back({{"name", r.name},
                               {"passed", r.passed},
                               {"worst", r.worst},
                               {"samples", r.samples},
                               {"note", r.note}});
      j["passed"] = ok;
      os << j.dump(2) << "\n";
      return;
    }
    os << "# toolkit = gaussep " << gaussep::kVersion << "\n";
    os << "# seed = " << c.seed << "\n";
    if (!c.fault.empty()) os << "# fault = " << c.fault << "\n";
    for (const auto& r : results) {
      os << r.name << " " << (r.passed ? "PASS" : "FAIL") << " worst=" << gaussep::format_double(r.worst)
         << " samples=" << r.samples;
      if (!r.note.empty()) os << " (" << r.note << ")";
      os << "\n";
    }
    os << (ok ? "all suites passed" : "verification FAILED") << "\n";
  });
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sweeps and invariant checks for Gaussian drift-diffusion gauging"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("gaussep ") + gaussep::kVersion);
  std::vector<std::unique_ptr<Sub>> subs;

  Sub& drift = make_sub(app, subs, "drift-eigs", "drift eigenvalues across detuning");
  add_keys(drift, kSqueezedKeys);
  add_keys(drift, {"delta-grid"});

  Sub& squeezed = make_sub(app, subs, "squeezed-gauge", "EP-branch gauge eigenvalues");
  add_keys(squeezed, kSqueezedKeys);
  add_keys(squeezed, {"axis", "branch", "kappa-grid", "r-grid", "phi-grid"});

  Sub& surface = make_sub(app, subs, "nm-surface", "memory-family gauge over the drift plane");
  add_keys(surface, kMemoryKeys);
  add_keys(surface, {"lambda-grid", "omega-grid"});

  Sub& branch = make_sub(app, subs, "nm-branch", "memory-family gauge along the EP lines");
  add_keys(branch, kMemoryKeys);
  add_keys(branch, {"branch-grid"});

  Sub& verify = make_sub(app, subs, "verify", "run the invariant suites");
  add_keys(verify, {"seed", "fault"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& s : subs) {
      if (!s->app->parsed()) continue;
      const SweepConfig c = resolve(*s);
      const std::string name = s->app->get_name();
      if (name == "verify") return run_verify(c);
      gaussep::SweepTable table;
      if (name == "drift-eigs") table = gaussep::cmd_drift_eigs(c);
      if (name == "squeezed-gauge") table = gaussep::cmd_squeezed_gauge(c);
      if (name == "nm-surface") table = gaussep::cmd_nm_surface(c);
      if (name == "nm-branch") table = gaussep::cmd_nm_branch(c);
      emit(c, [&](std::ostream& os) { gaussep::write_table(table, c.format, os); });
      return 0;
    }
  } catch (const gaussep::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == gaussep::ErrorKind::InvalidParameter ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
