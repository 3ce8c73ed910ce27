#include "mgw/law.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mgw {

const char* criticality_name(Criticality c) noexcept {
  switch (c) {
    case Criticality::subcritical: return "subcritical";
    case Criticality::critical: return "critical";
    case Criticality::supercritical: return "supercritical";
  }
  return "?";
}

MarkedGWLaw MarkedGWLaw::validate(std::vector<Atom> atoms,
                                  bool infinite_support) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.k < b.k; });
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (atoms[i].k == atoms[i - 1].k) {
      fail(Errc::not_a_probability,
           "duplicate offspring entry for k=" + std::to_string(atoms[i].k));
    }
  }

  Rational total(0);
  for (const auto& atom : atoms) {
    if (atom.p < 0) {
      fail(Errc::not_a_probability,
           "negative probability at k=" + std::to_string(atom.k));
    }
    if (atom.q < 0 || atom.q > 1) {
      fail(Errc::not_a_probability,
           "mark probability outside [0,1] at k=" + std::to_string(atom.k));
    }
    total += atom.p;
  }
  if (total != 1) {
    fail(Errc::not_a_probability,
         "offspring probabilities sum to " + to_fraction_string(total));
  }

  // Zero-probability entries carry no information.
  atoms.erase(std::remove_if(atoms.begin(), atoms.end(),
                             [](const Atom& a) { return a.p == 0; }),
              atoms.end());

  Rational head(0);
  for (const auto& atom : atoms) {
    if (atom.k <= 1) head += atom.p;
  }
  if (head == 1) {
    fail(Errc::degenerate, "p(0)+p(1) must be < 1");
  }

  MarkedGWLaw law;
  law.infinite_support_ = infinite_support;
  law.atoms_ = std::move(atoms);
  law.mean_ = 0;
  law.mean_marks_ = 0;
  bool mark_possible = false;
  bool r_set = false;
  for (const auto& atom : law.atoms_) {
    law.mean_ += Rational(atom.k) * atom.p;
    law.mean_marks_ += atom.p * atom.q;
    if (atom.p * atom.q > 0) mark_possible = true;
    if (!r_set) {
      law.bounds_.r = atom.k;
      r_set = true;
    }
    if (!law.bounds_.r_tilde && atom.p * (Rational(1) - atom.q) > 0) {
      law.bounds_.r_tilde = atom.k;
    }
  }
  if (!mark_possible) {
    fail(Errc::no_mark_possible, "no k has p(k)q(k) > 0");
  }
  return law;
}

namespace {

Rational json_value_to_rational(const nlohmann::json& value,
                                const std::string& where) {
  if (value.is_string()) {
    return parse_rational(value.get<std::string>());
  }
  if (value.is_number_integer()) {
    return Rational(value.get<long long>());
  }
  fail(Errc::parse,
       "probability at " + where +
           " must be a string (\"a/b\" or decimal) or an integer");
}

}  // namespace

MarkedGWLaw MarkedGWLaw::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse, std::string("bad law JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("p") || !doc["p"].is_object()) {
    fail(Errc::parse, "law JSON must contain an object field \"p\"");
  }
  std::vector<Atom> atoms;
  for (auto it = doc["p"].begin(); it != doc["p"].end(); ++it) {
    Atom atom;
    try {
      atom.k = static_cast<std::uint32_t>(std::stoul(it.key()));
    } catch (const std::exception&) {
      fail(Errc::parse, "bad out-degree key '" + it.key() + "'");
    }
    atom.p = json_value_to_rational(it.value(), "p[" + it.key() + "]");
    atom.q = Rational(0);
    atoms.push_back(std::move(atom));
  }
  if (doc.contains("q")) {
    if (!doc["q"].is_object()) fail(Errc::parse, "\"q\" must be an object");
    for (auto it = doc["q"].begin(); it != doc["q"].end(); ++it) {
      std::uint32_t k = 0;
      try {
        k = static_cast<std::uint32_t>(std::stoul(it.key()));
      } catch (const std::exception&) {
        fail(Errc::parse, "bad out-degree key '" + it.key() + "'");
      }
      Rational q = json_value_to_rational(it.value(), "q[" + it.key() + "]");
      bool found = false;
      for (auto& atom : atoms) {
        if (atom.k == k) {
          atom.q = q;
          found = true;
          break;
        }
      }
      // q entries for degrees outside the support are irrelevant.
      (void)found;
    }
  }
  bool infinite = doc.value("infinite_support", false);
  return validate(std::move(atoms), infinite);
}

MarkedGWLaw MarkedGWLaw::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::usage, "cannot open law file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

void MarkedGWLaw::require_finite(const char* op) const {
  if (infinite_support_) {
    fail(Errc::unsupported_infinite_support,
         std::string(op) + " requires a finite-support law");
  }
}

Criticality MarkedGWLaw::criticality() const {
  if (mean_ < 1) return Criticality::subcritical;
  if (mean_ == 1) return Criticality::critical;
  return Criticality::supercritical;
}

Rational MarkedGWLaw::p_of(std::uint32_t k) const {
  for (const auto& atom : atoms_) {
    if (atom.k == k) return atom.p;
  }
  return Rational(0);
}

Rational MarkedGWLaw::q_of(std::uint32_t k) const {
  for (const auto& atom : atoms_) {
    if (atom.k == k) return atom.q;
  }
  return Rational(0);
}

Rational MarkedGWLaw::p0_exact(std::uint32_t k, int eta) const {
  for (const auto& atom : atoms_) {
    if (atom.k == k) {
      return eta ? atom.p * atom.q : atom.p * (Rational(1) - atom.q);
    }
  }
  return Rational(0);
}

Rational MarkedGWLaw::mean_pairs_exact() const {
  Rational total(0);
  for (const auto& atom : atoms_) {
    total += atom.p * Rational(static_cast<long long>(atom.k) *
                               (static_cast<long long>(atom.k) - 1)) /
             Rational(2);
  }
  return total;
}

double reproduction_mark_prob(const MarkedGWLaw& law, std::uint32_t k,
                              int eta) {
  return law.p0(k, eta);
}

double truncated_tree_probability(const MarkedGWLaw& law,
                                  const MarkedTree& tree) {
  return truncated_tree_probability_as<double>(law, tree);
}

Jet<double> gen_fn_jet(const MarkedGWLaw& law, double s, double t,
                       int iterate_p, int order, bool zero_mark,
                       int max_order) {
  if (order < 0 || order > max_order || max_order > kHardMaxOrder) {
    fail(Errc::order_too_large,
         "derivative order " + std::to_string(order) + " exceeds max " +
             std::to_string(std::min(max_order, kHardMaxOrder)));
  }
  law.require_finite("gen_fn_eval");
  auto coeff = gen_fn_coefficients<double>(law, s, zero_mark);
  Jet<double> jet(static_cast<std::size_t>(order) + 1, 0.0);
  jet[0] = t;
  if (order >= 1) jet[1] = 1.0;
  for (int step = 0; step < iterate_p; ++step) {
    auto f_at = polynomial_jet<double>(coeff, jet[0], order);
    jet = compose_jets<double>(f_at, jet);
  }
  return jet;
}

double gen_fn_eval(const MarkedGWLaw& law, double s, double t, int iterate_p,
                   int order, bool zero_mark, int max_order) {
  return gen_fn_jet(law, s, t, iterate_p, order, zero_mark,
                    max_order)[static_cast<std::size_t>(order)];
}

}  // namespace mgw
