#include "mgw/run_config.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "mgw/asymptotics.hpp"
#include "mgw/law.hpp"
#include "mgw/moments.hpp"
#include "mgw/oracle.hpp"
#include "mgw/penalty.hpp"
#include "mgw/sampler.hpp"

namespace mgw::cli {

namespace {

using nlohmann::json;

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// write-temp-then-rename so readers never observe a partial file
void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::usage, "cannot write to '" + tmp.string() + "'");
    out << content;
  }
  fs::rename(tmp, target);
}

unsigned thread_count() {
  if (const char* env = std::getenv("MGW_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 256) return static_cast<unsigned>(v);
  }
  return 1;
}

json histogram_to_json(const std::map<std::string, std::uint64_t>& hist) {
  json out = json::object();
  for (const auto& [bucket, count] : hist) out[bucket] = count;
  return out;
}

json report_to_json(const CheckReport& report) {
  return json{{"check", report.check},
              {"regime", report.regime},
              {"depth", report.depth},
              {"cases", report.cases},
              {"max_gap", report.max_gap},
              {"tolerance", report.tolerance},
              {"pass", report.pass},
              {"residuals_histogram", histogram_to_json(
                                          report.residuals_histogram)}};
}

int cmd_validate(const RunConfig& config) {
  MarkedGWLaw law;
  try {
    law = MarkedGWLaw::load_file(config.law_path);
  } catch (const Error& e) {
    if (e.code() == Errc::not_a_probability || e.code() == Errc::degenerate ||
        e.code() == Errc::no_mark_possible) {
      std::cout << json{{"valid", false},
                        {"error", errc_name(e.code())},
                        {"detail", e.what()}}
                       .dump()
                << "\n";
      return 1;
    }
    throw;
  }
  auto bounds = law.degree_bounds();
  json out{{"valid", true},
           {"mu", law.mean()},
           {"mu_exact", to_fraction_string(law.mean_exact())},
           {"criticality", criticality_name(law.criticality())},
           {"mean_marks", law.mean_marks()},
           {"r", bounds.r}};
  if (bounds.r_tilde) {
    out["r_tilde"] = *bounds.r_tilde;
  } else {
    out["r_tilde"] = nullptr;
  }
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_kappa(const RunConfig& config) {
  MarkedGWLaw law = MarkedGWLaw::load_file(config.law_path);
  double kappa = kappa_solve(law, config.s, config.zero_mark);
  double derivative =
      gen_fn_derivative(law, config.s, kappa, config.zero_mark);
  std::cout << "{\"kappa\": " << format_g17(kappa)
            << ", \"derivative_at_kappa\": " << format_g17(derivative)
            << "}\n";
  return 0;
}

std::string sample_one(const MarkedGWLaw& law, const RunConfig& config,
                       const XiTable* xi, std::uint64_t index) {
  RngStream rng(config.seed + index);
  if (config.measure == "base") {
    return serialize_tree(sample_mgw(law, config.depth, rng));
  }
  if (config.measure == "poly-ell") {
    auto typed = sample_tau_ell(law, *xi, config.ell, config.depth, rng);
    return serialize_typed_tree(typed.tree, typed.types);
  }
  if (config.measure == "expo-spine") {
    auto typed = sample_spine_tree(law, config.s, config.depth, rng);
    return serialize_typed_tree(typed.tree, typed.types);
  }
  if (config.measure == "expo-rary") {
    return serialize_tree(sample_degenerate(law, config.s, config.depth, rng));
  }
  if (config.measure == "zero-mark") {
    return serialize_tree(sample_zero_mark_mgw(law, config.depth, rng));
  }
  if (config.measure == "zero-mark-spine") {
    auto typed = sample_spine_tree(law, std::nullopt, config.depth, rng);
    return serialize_typed_tree(typed.tree, typed.types);
  }
  fail(Errc::usage, "unknown measure '" + config.measure + "'");
}

int cmd_sample(const RunConfig& config) {
  MarkedGWLaw law = MarkedGWLaw::load_file(config.law_path);
  std::optional<XiTable> xi;
  if (config.measure == "poly-ell") {
    xi = xi_table<double>(law, std::max(config.ell, 1));
  }

  std::vector<std::string> results(config.count);
  unsigned threads = std::min<std::uint64_t>(thread_count(), config.count);
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < config.count; ++i) {
      results[i] = sample_one(law, config, xi ? &*xi : nullptr, i);
    }
  } else {
    // seed-sharded: tree i always uses seed+i, so the output is identical
    // whatever the thread count
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::uint64_t i = t; i < config.count; i += threads) {
            results[i] = sample_one(law, config, xi ? &*xi : nullptr, i);
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (auto& worker : pool) worker.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::string out;
  for (std::uint64_t i = 0; i < config.count; ++i) {
    if (i) out += "\n";  // blank line between trees
    out += results[i];
  }
  if (!config.out_path.empty()) {
    atomic_write(config.out_path, out);
  } else {
    std::cout << out;
  }
  return 0;
}

int cmd_moments(const RunConfig& config) {
  MarkedGWLaw law = MarkedGWLaw::load_file(config.law_path);
  int max_ell = std::max(config.ell, 1);
  int p_max = config.p_max > 0 ? config.p_max : 25;
  auto crit = law.criticality();
  const char* regime = criticality_name(crit);

  std::vector<double> limit(static_cast<std::size_t>(max_ell) + 1, 0.0);
  if (crit == Criticality::subcritical) {
    auto xi = xi_table<double>(law, max_ell);
    limit = xi.xi;
  } else if (crit == Criticality::supercritical) {
    auto omega = omega_table<double>(law, max_ell);
    limit = omega.omega;
  } else {
    auto omega = omega_tilde_table<double>(law, max_ell);
    limit = omega.omega;
  }
  auto rows = moment_rows<double>(law, p_max, max_ell);
  double mu = law.mean();

  std::ostringstream csv;
  csv << "regime,ell,p,exact_value,asymptotic_prediction,ratio\n";
  for (int ell = 1; ell <= max_ell; ++ell) {
    for (int p = 1; p <= p_max; ++p) {
      double exact =
          rows[static_cast<std::size_t>(p)][static_cast<std::size_t>(ell)];
      double prediction = 0;
      switch (crit) {
        case Criticality::subcritical:
          prediction = limit[static_cast<std::size_t>(ell)];
          break;
        case Criticality::supercritical:
          prediction = limit[static_cast<std::size_t>(ell)] *
                       std::pow(mu, static_cast<double>(ell) * p);
          break;
        case Criticality::critical:
          prediction = limit[static_cast<std::size_t>(ell)] *
                       std::pow(static_cast<double>(p), 2.0 * ell - 1.0);
          break;
      }
      csv << regime << ',' << ell << ',' << p << ',' << format_g17(exact)
          << ',' << format_g17(prediction) << ','
          << format_g17(exact / prediction) << "\n";
    }
  }
  if (!config.out_path.empty()) {
    atomic_write(config.out_path, csv.str());
  } else {
    std::cout << csv.str();
  }
  return 0;
}

int cmd_verify(const RunConfig& config) {
  MarkedGWLaw law = MarkedGWLaw::load_file(config.law_path);
  PenaltyRegime regime = parse_regime(config.regime, config.ell, config.s);
  OracleMode mode = config.exact ? OracleMode::exact : OracleMode::floating;

  std::vector<CheckReport> reports;
  reports.push_back(
      check_martingale(law, regime, config.depth, mode));
  bool has_construction = regime.kind != RegimeKind::poly_crit &&
                          regime.kind != RegimeKind::poly_super;
  if (has_construction) {
    reports.push_back(
        check_change_of_measure(law, regime, config.depth, mode));
  }

  bool pass = true;
  double max_gap = 0.0;
  std::map<std::string, std::uint64_t> merged;
  json checks = json::array();
  for (const auto& report : reports) {
    pass = pass && report.pass;
    max_gap = std::max(max_gap, report.max_gap);
    for (const auto& [bucket, count] : report.residuals_histogram) {
      merged[bucket] += count;
    }
    checks.push_back(report_to_json(report));
  }
  json out{{"regime", reports.front().regime},
           {"depth", config.depth},
           {"exact", config.exact},
           {"max_gap", max_gap},
           {"residuals_histogram", histogram_to_json(merged)},
           {"pass", pass},
           {"checks", checks}};
  std::cout << out.dump() << "\n";
  return pass ? 0 : 1;
}

int cmd_asymptotics(const RunConfig& config) {
  MarkedGWLaw law = MarkedGWLaw::load_file(config.law_path);
  ConvergenceReport report;
  if (config.kind == "moment") {
    GrowthTarget target = GrowthTarget::auto_detect;
    if (config.target == "critical") {
      target = GrowthTarget::critical;
    } else if (config.target == "supercritical") {
      target = GrowthTarget::supercritical;
    } else if (config.target != "auto") {
      fail(Errc::usage, "unknown target '" + config.target + "'");
    }
    report = check_moment_growth(law, config.ell, config.p_max, target);
  } else if (config.kind == "gf") {
    report =
        check_gf_asymptotics(law, config.s, config.t, config.ell,
                             config.p_max);
  } else {
    fail(Errc::usage, "unknown asymptotics kind '" + config.kind + "'");
  }

  std::ostringstream csv;
  csv << "p,value,predicted,ratio\n";
  for (const auto& point : report.points) {
    csv << point.p << ',' << format_g17(point.value) << ','
        << format_g17(point.predicted) << ',' << format_g17(point.ratio)
        << "\n";
  }
  json verdict{{"verdict", verdict_name(report.verdict)},
               {"threshold", report.threshold},
               {"window", report.window},
               {"description", report.description}};
  if (!config.out_path.empty()) {
    atomic_write(config.out_path, csv.str());
  } else {
    std::cout << csv.str();
  }
  std::cout << verdict.dump() << "\n";
  return 0;
}

}  // namespace

std::string RunConfig::to_json_text() const {
  json out{{"subcommand", subcommand}, {"law", law_path},
           {"regime", regime},         {"measure", measure},
           {"kind", kind},             {"target", target},
           {"out", out_path},          {"ell", ell},
           {"s", s},                   {"t", t},
           {"depth", depth},           {"p_max", p_max},
           {"count", count},           {"seed", seed},
           {"exact", exact},           {"zero_mark", zero_mark}};
  return out.dump();
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json doc = json::parse(text);
  RunConfig config;
  config.subcommand = doc.value("subcommand", "");
  config.law_path = doc.value("law", "");
  config.regime = doc.value("regime", "");
  config.measure = doc.value("measure", "base");
  config.kind = doc.value("kind", "moment");
  config.target = doc.value("target", "auto");
  config.out_path = doc.value("out", "");
  config.ell = doc.value("ell", 1);
  config.s = doc.value("s", 0.5);
  config.t = doc.value("t", 0.5);
  config.depth = doc.value("depth", 2);
  config.p_max = doc.value("p_max", 0);
  config.count = doc.value("count", std::uint64_t{1});
  config.seed = doc.value("seed", std::uint64_t{20240101});
  config.exact = doc.value("exact", false);
  config.zero_mark = doc.value("zero_mark", false);
  return config;
}

int run(int argc, const char* const* argv) {
  RunConfig config;
  CLI::App app{"marked Galton-Watson penalization toolkit", "mgw"};
  app.require_subcommand(1);

  auto add_law = [&](CLI::App* cmd) {
    cmd->add_option("--law", config.law_path, "law JSON file")->required();
  };

  auto* validate = app.add_subcommand("validate", "check a law file");
  add_law(validate);

  auto* sample = app.add_subcommand("sample", "draw trees under a measure");
  add_law(sample);
  sample->add_option("--measure", config.measure,
                     "base|poly-ell|expo-spine|expo-rary|zero-mark|"
                     "zero-mark-spine");
  sample->add_option("--ell", config.ell, "type order for poly-ell");
  sample->add_option("--s", config.s, "mark weight s in (0,1)");
  sample->add_option("--depth", config.depth, "truncation depth");
  sample->add_option("--count", config.count, "number of trees");
  sample->add_option("--seed", config.seed, "base seed (tree i uses seed+i)");
  sample->add_option("--out", config.out_path, "output file");

  auto* moments = app.add_subcommand("moments", "exact vs asymptotic moments");
  add_law(moments);
  moments->add_option("--ell", config.ell, "max moment order");
  moments->add_option("--p-max", config.p_max, "largest horizon p");
  moments->add_option("--out", config.out_path, "CSV output file");

  auto* kappa = app.add_subcommand("kappa", "fixed point of f_s (or psi)");
  add_law(kappa);
  kappa->add_option("--s", config.s, "mark weight s");
  kappa->add_flag("--zero-mark", config.zero_mark,
                  "solve psi(t)=t instead of f_s(t)=t");

  auto* verify = app.add_subcommand(
      "verify", "martingale and change-of-measure checks by enumeration");
  add_law(verify);
  verify->add_option("--regime", config.regime,
                     "poly-sub|poly-crit|poly-super|expo-positive|expo-rary|"
                     "zero-mark|zero-mark-rary")
      ->required();
  verify->add_option("--ell", config.ell, "moment/Hilbert order");
  verify->add_option("--s", config.s, "mark weight s");
  verify->add_option("--depth", config.depth, "enumeration depth (<= 3)");
  verify->add_flag("--exact", config.exact, "exact rational arithmetic");

  auto* asym = app.add_subcommand("asymptotics", "convergence diagnostics");
  add_law(asym);
  asym->add_option("--kind", config.kind, "moment|gf");
  asym->add_option("--ell", config.ell, "order");
  asym->add_option("--s", config.s, "mark weight s");
  asym->add_option("--t", config.t, "evaluation point t");
  asym->add_option("--p-max", config.p_max, "iterations");
  asym->add_option("--target", config.target,
                   "auto|critical|supercritical (moment kind)");
  asym->add_option("--out", config.out_path, "CSV output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << e.what() << "\n";
    return 2;
  }

  config.subcommand = app.get_subcommands().front()->get_name();

  try {
    if (config.subcommand == "validate") return cmd_validate(config);
    if (config.subcommand == "sample") return cmd_sample(config);
    if (config.subcommand == "moments") return cmd_moments(config);
    if (config.subcommand == "kappa") return cmd_kappa(config);
    if (config.subcommand == "verify") return cmd_verify(config);
    if (config.subcommand == "asymptotics") return cmd_asymptotics(config);
    std::cerr << "unknown subcommand\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("mgw");
  for (const auto& arg : args) argv.push_back(arg.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace mgw::cli
