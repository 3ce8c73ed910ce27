#include "mgw/sampler.hpp"

#include <algorithm>

namespace mgw {

namespace {

struct PendingNode {
  NodeWord word;
  double mass = 0.0;
  std::uint8_t type = 0;
};

std::pair<std::uint32_t, std::uint8_t> draw_atom(const TiltedNodeLaw& law,
                                                 RngStream& rng) {
  double u = rng.uniform01();
  double cum = 0.0;
  for (const auto& atom : law.atoms) {
    cum += atom.prob;
    if (u < cum) return {atom.k, atom.eta};
  }
  const auto& last = law.atoms.back();
  return {last.k, last.eta};
}

// Breadth-first growth where every node reproduces by the same law.
MarkedTree sample_with_node_law(const TiltedNodeLaw& node_law,
                                std::uint32_t depth, RngStream& rng,
                                std::uint64_t budget) {
  std::vector<TreeRecord> records;
  std::uint64_t node_count = 0;
  std::vector<NodeWord> current{NodeWord{}};
  for (std::uint32_t g = 0; g < depth && !current.empty(); ++g) {
    std::vector<NodeWord> next;
    for (auto& word : current) {
      auto [k, eta] = draw_atom(node_law, rng);
      records.push_back({word, k, eta});
      for (std::uint32_t j = 1; j <= k; ++j) next.push_back(word.child(j));
      if (++node_count > budget) {
        fail(Errc::node_budget_exceeded,
             "sampled tree exceeds node budget " + std::to_string(budget));
      }
    }
    current = std::move(next);
  }
  // horizon generation: leaves, unmarked
  for (auto& word : current) records.push_back({word, 0, 0});
  return build_tree(std::move(records), depth);
}

}  // namespace

MarkedTree sample_mgw(const MarkedGWLaw& law, std::uint32_t depth,
                      RngStream& rng, std::uint64_t budget) {
  return sample_with_node_law(base_node_law<double>(law), depth, rng, budget);
}

std::uint64_t sample_total_marks(const MarkedGWLaw& law, RngStream& rng,
                                 std::uint64_t budget) {
  if (law.criticality() != Criticality::subcritical) {
    fail(Errc::not_subcritical, "total-mark sampling needs mu < 1");
  }
  auto node_law = base_node_law<double>(law);
  std::uint64_t marks = 0;
  std::uint64_t population = 1;  // nodes not yet reproduced
  std::uint64_t total = 0;
  while (population > 0) {
    auto [k, eta] = draw_atom(node_law, rng);
    marks += eta;
    population += k;
    --population;
    if (++total > budget) {
      fail(Errc::node_budget_exceeded, "tree exceeds node budget");
    }
  }
  return marks;
}

TypedMarkedTree sample_tau_ell(const MarkedGWLaw& law, const XiTable& xi,
                               int ell, std::uint32_t depth, RngStream& rng,
                               std::uint64_t budget, std::uint64_t type_cap) {
  if (law.criticality() != Criticality::subcritical) {
    fail(Errc::regime_mismatch, "tau_ell sampling needs mu < 1");
  }
  if (ell < 1 || ell > xi.max_order()) {
    fail(Errc::order_too_large, "tau_ell needs 1 <= ell <= xi order");
  }
  // Generation-synchronous: the next generation's masses and type vector
  // need the reproduction outcome of the whole current generation.
  std::vector<TreeRecord> out_records;
  std::vector<std::uint8_t> out_types;
  std::uint64_t node_count = 0;
  std::vector<PendingNode> current;
  {
    PendingNode root;
    root.type = static_cast<std::uint8_t>(ell);
    current.push_back(root);
  }
  std::uint64_t m_n = 0;
  for (std::uint32_t g = 0; g < depth && !current.empty(); ++g) {
    struct Outcome {
      std::uint32_t k;
      std::uint8_t eta;
    };
    std::vector<Outcome> outcomes(current.size());
    std::vector<PendingNode> next;
    std::uint64_t gen_marks = 0;
    for (std::size_t i = 0; i < current.size(); ++i) {
      auto node_law =
          typed_node_law<double>(law, xi, current[i].type, current[i].mass);
      auto [k, eta] = draw_atom(node_law, rng);
      outcomes[i] = {k, eta};
      out_records.push_back({current[i].word, k, eta});
      out_types.push_back(current[i].type);
      gen_marks += eta;
      if (++node_count > budget) {
        fail(Errc::node_budget_exceeded, "tau_ell exceeds node budget");
      }
    }
    // masses of generation g+1
    double leak = 0.0;
    for (std::size_t i = 0; i < current.size(); ++i) {
      if (outcomes[i].k == 0) leak += current[i].mass + outcomes[i].eta;
    }
    for (std::size_t i = 0; i < current.size(); ++i) {
      for (std::uint32_t j = 1; j <= outcomes[i].k; ++j) {
        PendingNode child;
        child.word = current[i].word.child(j);
        child.mass = (current[i].mass + outcomes[i].eta) / outcomes[i].k;
        next.push_back(std::move(child));
      }
    }
    m_n += gen_marks;
    if (next.empty()) {
      current.clear();
      break;
    }
    double shared = leak / static_cast<double>(next.size());
    std::vector<double> masses(next.size());
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i].mass += shared;
      masses[i] = next[i].mass;
    }
    // types of generation g+1 from the gamma law
    auto dist = gamma_type_distribution<double>(
        xi, ell, masses, static_cast<double>(m_n), type_cap);
    double u = rng.uniform01();
    double cum = 0.0;
    std::size_t pick = dist.vectors.size() - 1;
    for (std::size_t v = 0; v < dist.vectors.size(); ++v) {
      cum += dist.probs[v];
      if (u < cum) {
        pick = v;
        break;
      }
    }
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i].type = dist.vectors[pick][i];
    }
    current = std::move(next);
  }
  for (auto& node : current) {
    out_records.push_back({node.word, 0, 0});
    out_types.push_back(node.type);
  }

  TypedMarkedTree result;
  // build_tree sorts records depth-major; our construction already emits
  // them in that order, so types stay aligned.
  result.tree = build_tree(std::move(out_records), depth);
  result.types = std::move(out_types);
  return result;
}

TypedMarkedTree sample_spine_tree(const MarkedGWLaw& law,
                                  std::optional<double> s, std::uint32_t depth,
                                  RngStream& rng, std::uint64_t budget) {
  TiltedNodeLaw normal;
  TiltedNodeLaw special;
  if (s) {
    require_admissible(law, PenaltyRegime::expo_positive(*s, 1));
    double kappa = kappa_solve(law, *s, false);
    double fprime = gen_fn_derivative(law, *s, kappa, false);
    normal = leafless_node_law<double>(law, *s, kappa);
    special = spine_node_law<double>(law, *s, kappa, fprime);
  } else {
    require_admissible(law, PenaltyRegime::zero_mark(1));
    double kt = kappa_solve(law, 0.0, true);
    double psiprime = gen_fn_derivative(law, 0.0, kt, true);
    normal = zero_mark_node_law<double>(law, kt);
    special = zero_mark_spine_node_law<double>(law, kt, psiprime);
  }

  std::vector<TreeRecord> records;
  std::vector<std::uint8_t> types;
  std::uint64_t node_count = 0;
  std::vector<PendingNode> current;
  {
    PendingNode root;
    root.type = 1;  // the root is special
    current.push_back(root);
  }
  for (std::uint32_t g = 0; g < depth && !current.empty(); ++g) {
    std::vector<PendingNode> next;
    for (auto& node : current) {
      auto [k, eta] =
          draw_atom(node.type == 1 ? special : normal, rng);
      records.push_back({node.word, k, eta});
      types.push_back(node.type);
      for (std::uint32_t j = 1; j <= k; ++j) {
        PendingNode child;
        child.word = node.word.child(j);
        next.push_back(std::move(child));
      }
      if (++node_count > budget) {
        fail(Errc::node_budget_exceeded, "spine tree exceeds node budget");
      }
    }
    // the special node keeps the line alive
    if (next.empty()) {
      fail(Errc::not_normalizable, "spine died out; p_{s,1}(0,.) must be 0");
    }
    next[rng.uniform_index(next.size())].type = 1;
    current = std::move(next);
  }
  for (auto& node : current) {
    records.push_back({node.word, 0, 0});
    types.push_back(node.type);
  }
  TypedMarkedTree result;
  result.tree = build_tree(std::move(records), depth);
  result.types = std::move(types);
  return result;
}

MarkedTree sample_leafless_mgw(const MarkedGWLaw& law, double s,
                               std::uint32_t depth, RngStream& rng,
                               std::uint64_t budget) {
  require_admissible(law, PenaltyRegime::expo_positive(s, 0));
  double kappa = kappa_solve(law, s, false);
  return sample_with_node_law(leafless_node_law<double>(law, s, kappa), depth,
                              rng, budget);
}

MarkedTree sample_zero_mark_mgw(const MarkedGWLaw& law, std::uint32_t depth,
                                RngStream& rng, std::uint64_t budget) {
  require_admissible(law, PenaltyRegime::zero_mark(0));
  double kt = kappa_solve(law, 0.0, true);
  return sample_with_node_law(zero_mark_node_law<double>(law, kt), depth, rng,
                              budget);
}

MarkedTree sample_degenerate(const MarkedGWLaw& law, double s,
                             std::uint32_t depth, RngStream& rng,
                             std::uint64_t budget) {
  std::uint32_t arity = 0;
  TiltedNodeLaw node_law;
  if (s > 0) {
    require_admissible(law, PenaltyRegime::expo_rary(s));
    arity = law.degree_bounds().r;
    node_law = rary_node_law<double>(law, s, arity);
  } else {
    require_admissible(law, PenaltyRegime::zero_mark_rary());
    arity = *law.degree_bounds().r_tilde;
    node_law.kind = NodeLawKind::rary;
    node_law.atoms.push_back({arity, 0, 1.0});
  }
  std::vector<TreeRecord> records;
  std::uint64_t node_count = 0;
  std::vector<NodeWord> current{NodeWord{}};
  for (std::uint32_t g = 0; g < depth; ++g) {
    std::vector<NodeWord> next;
    for (auto& word : current) {
      auto [k, eta] = draw_atom(node_law, rng);
      records.push_back({word, k, eta});
      for (std::uint32_t j = 1; j <= k; ++j) next.push_back(word.child(j));
      if (++node_count > budget) {
        fail(Errc::node_budget_exceeded, "r-ary tree exceeds node budget");
      }
    }
    current = std::move(next);
  }
  for (auto& word : current) {
    records.push_back({word, 0, 0});
    if (++node_count > budget) {
      fail(Errc::node_budget_exceeded, "r-ary tree exceeds node budget");
    }
  }
  return build_tree(std::move(records), depth);
}

}  // namespace mgw
