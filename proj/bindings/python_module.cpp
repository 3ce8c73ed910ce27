#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "mgw/asymptotics.hpp"
#include "mgw/law.hpp"
#include "mgw/marked_tree.hpp"
#include "mgw/moments.hpp"
#include "mgw/oracle.hpp"
#include "mgw/penalty.hpp"
#include "mgw/run_config.hpp"
#include "mgw/sampler.hpp"

namespace py = pybind11;
using namespace mgw;

namespace {

PenaltyRegime make_regime(const std::string& tag, int ell, double s) {
  return parse_regime(tag, ell, s);
}

py::dict report_to_dict(const CheckReport& report) {
  py::dict out;
  out["check"] = report.check;
  out["regime"] = report.regime;
  out["depth"] = report.depth;
  out["cases"] = report.cases;
  out["max_gap"] = report.max_gap;
  out["tolerance"] = report.tolerance;
  out["pass"] = report.pass;
  py::dict hist;
  for (const auto& [bucket, count] : report.residuals_histogram) {
    hist[py::str(bucket)] = count;
  }
  out["residuals_histogram"] = hist;
  return out;
}

py::dict convergence_to_dict(const ConvergenceReport& report) {
  py::dict out;
  out["verdict"] = verdict_name(report.verdict);
  out["threshold"] = report.threshold;
  out["window"] = report.window;
  out["description"] = report.description;
  py::list points;
  for (const auto& point : report.points) {
    points.append(py::make_tuple(point.p, point.value, point.predicted,
                                 point.ratio));
  }
  out["points"] = points;
  return out;
}

}  // namespace

PYBIND11_MODULE(mgwpen, m) {
  m.doc() = "marked Galton-Watson trees: penalization martingales, tilted "
            "samplers, exact enumeration checks";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<MarkedGWLaw>(m, "Law")
      .def_static("load", &MarkedGWLaw::load_file, py::arg("path"))
      .def_static("from_json", &MarkedGWLaw::from_json_text, py::arg("text"))
      .def_property_readonly("mean", &MarkedGWLaw::mean)
      .def_property_readonly("mean_exact",
                             [](const MarkedGWLaw& law) {
                               return to_fraction_string(law.mean_exact());
                             })
      .def_property_readonly("mean_marks", &MarkedGWLaw::mean_marks)
      .def_property_readonly("criticality",
                             [](const MarkedGWLaw& law) {
                               return std::string(
                                   criticality_name(law.criticality()));
                             })
      .def_property_readonly("r",
                             [](const MarkedGWLaw& law) {
                               return law.degree_bounds().r;
                             })
      .def_property_readonly(
          "r_tilde",
          [](const MarkedGWLaw& law) -> std::optional<std::uint32_t> {
            auto bounds = law.degree_bounds();
            if (bounds.r_tilde) return *bounds.r_tilde;
            return std::nullopt;
          })
      .def("p0", &MarkedGWLaw::p0, py::arg("k"), py::arg("eta"));

  py::class_<MarkedTree>(m, "Tree")
      .def_static(
          "parse",
          [](const std::string& text, std::uint32_t height) {
            return parse_tree(text, height);
          },
          py::arg("text"), py::arg("height"))
      .def_static(
          "build",
          [](const std::vector<std::tuple<std::string, std::uint32_t, int>>&
                 records,
             std::uint32_t height) {
            std::vector<TreeRecord> recs;
            for (const auto& [word, k, mark] : records) {
              recs.push_back({parse_word(word), k,
                              static_cast<std::uint8_t>(mark)});
            }
            return build_tree(std::move(recs), height);
          },
          py::arg("records"), py::arg("height"))
      .def("serialize", &serialize_tree)
      .def_property_readonly("height", &MarkedTree::height)
      .def_property_readonly("size", &MarkedTree::size)
      .def("generation_size", &MarkedTree::generation_size, py::arg("n"))
      .def("marks_below", &MarkedTree::marks_below, py::arg("n"))
      .def("restrict", &restrict_tree, py::arg("h"))
      .def("masses",
           [](const MarkedTree& tree) {
             MassAssignment ma = compute_masses(tree);
             std::vector<std::tuple<std::string, std::string, double>> out;
             for (std::size_t i = 0; i < tree.size(); ++i) {
               out.emplace_back(format_word(tree.word(i)),
                                to_fraction_string(ma.masses[i]),
                                to_double(ma.masses[i]));
             }
             return out;
           })
      .def("__eq__",
           [](const MarkedTree& a, const MarkedTree& b) { return a == b; });

  m.def(
      "generation_stats",
      [](const MarkedTree& tree, std::uint32_t n) {
        auto stats = generation_stats(tree, n);
        py::dict out;
        out["z_n"] = stats.z_n;
        out["m_n"] = stats.m_n;
        py::list nodes;
        for (const auto& word : stats.nodes) nodes.append(format_word(word));
        out["nodes"] = nodes;
        return out;
      },
      py::arg("tree"), py::arg("n"));

  m.def("truncated_tree_probability", &truncated_tree_probability,
        py::arg("law"), py::arg("tree"));
  m.def("reproduction_mark_prob", &reproduction_mark_prob, py::arg("law"),
        py::arg("k"), py::arg("eta"));

  m.def(
      "xi_table",
      [](const MarkedGWLaw& law, int max_ell) {
        return xi_table<double>(law, max_ell).xi;
      },
      py::arg("law"), py::arg("max_ell"));
  m.def(
      "xi_table_exact",
      [](const MarkedGWLaw& law, int max_ell) {
        auto table = xi_table<Rational>(law, max_ell);
        std::vector<std::string> out;
        for (const auto& v : table.xi) out.push_back(to_fraction_string(v));
        return out;
      },
      py::arg("law"), py::arg("max_ell"));
  m.def(
      "omega_table",
      [](const MarkedGWLaw& law, int max_ell) {
        return omega_table<double>(law, max_ell).omega;
      },
      py::arg("law"), py::arg("max_ell"));
  m.def(
      "omega_tilde_table",
      [](const MarkedGWLaw& law, int max_ell) {
        return omega_tilde_table<double>(law, max_ell).omega;
      },
      py::arg("law"), py::arg("max_ell"));
  m.def(
      "f_ell",
      [](const MarkedGWLaw& law, int ell, double m, std::uint64_t z) {
        auto xi = xi_table<double>(law, std::max(ell, 1));
        return f_ell_eval<double>(xi, ell, m, z);
      },
      py::arg("law"), py::arg("ell"), py::arg("m"), py::arg("z"));
  m.def("moment_mp", &moment_Mp_exact, py::arg("law"), py::arg("p"),
        py::arg("ell"));
  m.def(
      "conditional_moment",
      [](const MarkedGWLaw& law, double m_n, std::uint64_t z_n, int p,
         int ell) {
        return conditional_moment<double>(law, m_n, z_n, p, ell);
      },
      py::arg("law"), py::arg("m_n"), py::arg("z_n"), py::arg("p"),
      py::arg("ell"));
  m.def(
      "p_ell",
      [](const MarkedGWLaw& law, int ell, std::uint64_t z) {
        auto omega = omega_table<double>(law, std::max(ell, 1));
        return p_ell_eval<double>(omega, ell, z);
      },
      py::arg("law"), py::arg("ell"), py::arg("z"));
  m.def("hilbert", &hilbert_eval, py::arg("ell"), py::arg("x"));

  m.def("kappa", &kappa_solve, py::arg("law"), py::arg("s"),
        py::arg("zero_mark") = false);
  m.def("gen_fn", &gen_fn_eval, py::arg("law"), py::arg("s"), py::arg("t"),
        py::arg("p"), py::arg("order") = 0, py::arg("zero_mark") = false,
        py::arg("max_order") = kDefaultMaxOrder);
  m.def("b_exponent", &b_exponent, py::arg("law"), py::arg("s"),
        py::arg("t"));

  m.def(
      "girsanov_weight",
      [](const MarkedGWLaw& law, const std::string& regime_tag, int ell,
         double s, std::uint32_t n, std::uint64_t z_n, std::uint64_t m_n) {
        auto regime = make_regime(regime_tag, ell, s);
        auto tables = build_penalty_tables<double>(law, regime);
        auto weight = girsanov_weight(regime, law, tables, n, z_n, m_n);
        return py::make_tuple(weight.value, weight.log_value);
      },
      py::arg("law"), py::arg("regime"), py::arg("ell"), py::arg("s"),
      py::arg("n"), py::arg("z_n"), py::arg("m_n"),
      "returns (value, log_value) of the martingale density B_n");

  m.def(
      "gamma_distribution",
      [](const MarkedGWLaw& law, int ell, const std::vector<double>& masses,
         double m_n) {
        auto xi = xi_table<double>(law, std::max(ell, 1));
        auto dist = gamma_type_distribution<double>(xi, ell, masses, m_n);
        std::vector<std::pair<std::vector<int>, double>> out;
        for (std::size_t v = 0; v < dist.vectors.size(); ++v) {
          std::vector<int> types(dist.vectors[v].begin(),
                                 dist.vectors[v].end());
          out.emplace_back(std::move(types), dist.probs[v]);
        }
        return out;
      },
      py::arg("law"), py::arg("ell"), py::arg("masses"), py::arg("m_n"));

  m.def(
      "sample",
      [](const MarkedGWLaw& law, const std::string& measure, int ell,
         double s, std::uint32_t depth, std::uint64_t count,
         std::uint64_t seed) {
        std::vector<std::string> out;
        std::optional<XiTable> xi;
        if (measure == "poly-ell") {
          xi = xi_table<double>(law, std::max(ell, 1));
        }
        for (std::uint64_t i = 0; i < count; ++i) {
          RngStream rng(seed + i);
          if (measure == "base") {
            out.push_back(serialize_tree(sample_mgw(law, depth, rng)));
          } else if (measure == "poly-ell") {
            auto typed = sample_tau_ell(law, *xi, ell, depth, rng);
            out.push_back(serialize_typed_tree(typed.tree, typed.types));
          } else if (measure == "expo-spine") {
            auto typed = sample_spine_tree(law, s, depth, rng);
            out.push_back(serialize_typed_tree(typed.tree, typed.types));
          } else if (measure == "expo-rary") {
            out.push_back(
                serialize_tree(sample_degenerate(law, s, depth, rng)));
          } else if (measure == "zero-mark") {
            out.push_back(
                serialize_tree(sample_zero_mark_mgw(law, depth, rng)));
          } else if (measure == "zero-mark-spine") {
            auto typed = sample_spine_tree(law, std::nullopt, depth, rng);
            out.push_back(serialize_typed_tree(typed.tree, typed.types));
          } else {
            fail(Errc::usage, "unknown measure '" + measure + "'");
          }
        }
        return out;
      },
      py::arg("law"), py::arg("measure"), py::arg("ell") = 1,
      py::arg("s") = 0.5, py::arg("depth") = 2, py::arg("count") = 1,
      py::arg("seed") = 20240101);

  m.def(
      "enumerate_trees",
      [](const MarkedGWLaw& law, std::uint32_t depth) {
        auto measure = enumerate_truncated<Rational>(law, depth);
        std::vector<std::tuple<std::string, double, std::string>> out;
        for (std::size_t i = 0; i < measure.trees.size(); ++i) {
          out.emplace_back(serialize_tree(measure.trees[i]),
                           to_double(measure.probs[i]),
                           to_fraction_string(measure.probs[i]));
        }
        return out;
      },
      py::arg("law"), py::arg("depth"));

  m.def(
      "verify",
      [](const MarkedGWLaw& law, const std::string& regime_tag, int ell,
         double s, std::uint32_t depth, bool exact) {
        auto regime = make_regime(regime_tag, ell, s);
        OracleMode mode = exact ? OracleMode::exact : OracleMode::floating;
        py::list reports;
        reports.append(
            report_to_dict(check_martingale(law, regime, depth, mode)));
        if (regime.kind != RegimeKind::poly_crit &&
            regime.kind != RegimeKind::poly_super) {
          reports.append(report_to_dict(
              check_change_of_measure(law, regime, depth, mode)));
        }
        return reports;
      },
      py::arg("law"), py::arg("regime"), py::arg("ell") = 1,
      py::arg("s") = 0.5, py::arg("depth") = 2, py::arg("exact") = false);

  m.def(
      "moment_growth",
      [](const MarkedGWLaw& law, int ell, int p_max,
         const std::string& target) {
        GrowthTarget growth = GrowthTarget::auto_detect;
        if (target == "critical") growth = GrowthTarget::critical;
        if (target == "supercritical") growth = GrowthTarget::supercritical;
        return convergence_to_dict(
            check_moment_growth(law, ell, p_max, growth));
      },
      py::arg("law"), py::arg("ell"), py::arg("p_max") = 0,
      py::arg("target") = "auto");
  m.def(
      "gf_asymptotics",
      [](const MarkedGWLaw& law, double s, double t, int ell, int p_max) {
        return convergence_to_dict(
            check_gf_asymptotics(law, s, t, ell, p_max));
      },
      py::arg("law"), py::arg("s"), py::arg("t"), py::arg("ell"),
      py::arg("p_max") = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) { return cli::run(args); },
      py::arg("args"), "run the mgw command line with the given arguments");
}
