#pragma once

// Template bodies for oracle.hpp; include that header instead.

namespace mgw {

template <class S>
EnumeratedMeasureT<S> enumerate_truncated(const MarkedGWLaw& law,
                                          std::uint32_t depth,
                                          std::uint64_t cap) {
  law.require_finite("enumerate_truncated");
  if (depth > 4 || law.support().size() > 6) {
    fail(Errc::state_space_too_large,
         "enumeration supports depth <= 4 and at most 6 offspring atoms");
  }
  auto node_law = base_node_law<S>(law);

  EnumeratedMeasureT<S> measure;
  measure.depth = depth;
  measure.law_fingerprint = law_fingerprint(law);

  std::vector<TreeRecord> records;
  std::vector<NodeWord> generation{NodeWord{}};

  auto emit = [&](const S& prob) {
    std::vector<TreeRecord> full = records;
    for (const auto& word : generation) full.push_back({word, 0, 0});
    measure.trees.push_back(build_tree(std::move(full), depth));
    measure.probs.push_back(prob);
    if (measure.trees.size() > cap) {
      fail(Errc::state_space_too_large,
           "enumeration exceeds cap " + std::to_string(cap));
    }
  };

  auto per_generation = [&](auto&& self, std::uint32_t g, S prob) -> void {
    if (g == depth || generation.empty()) {
      emit(prob);
      return;
    }
    std::vector<NodeWord> nodes = generation;
    // assign a (k, eta) atom to every node of this generation
    auto per_node = [&](auto&& node_self, std::size_t i,
                        std::vector<NodeWord>& next, const S& acc) -> void {
      if (i == nodes.size()) {
        std::swap(generation, next);
        self(self, g + 1, acc);
        std::swap(generation, next);
        return;
      }
      for (const auto& atom : node_law.atoms) {
        records.push_back({nodes[i], atom.k, atom.eta});
        std::size_t added = 0;
        for (std::uint32_t j = 1; j <= atom.k; ++j, ++added) {
          next.push_back(nodes[i].child(j));
        }
        node_self(node_self, i + 1, next, acc * atom.prob);
        for (std::size_t j = 0; j < added; ++j) next.pop_back();
        records.pop_back();
      }
    };
    std::vector<NodeWord> next;
    per_node(per_node, 0, next, prob);
  };

  per_generation(per_generation, 0, S(1));
  return measure;
}

namespace oracle_detail {

// p_i(k, eta | m) = p_0(k, eta) f_i(m+eta, k) / f_i(m, 1)
template <class S>
S typed_transition_prob(const MarkedGWLaw& law, const BasicXiTable<S>& xi,
                        int type, const S& mass, std::uint32_t k, int eta) {
  S base = ScalarOps<S>::from_rational(law.p0_exact(k, eta));
  if (type == 0) return base;
  return base *
         f_ell_eval<S>(xi, type, mass + ScalarOps<S>::from_int(eta), k) /
         f_ell_eval<S>(xi, type, mass, 1);
}

// One generation's factor of the spine construction: the special node is
// uniform over the generation, reproduces by `special`, the rest by
// `normal`.
template <class S>
S spine_generation_factor(const TiltedNodeLawT<S>& normal,
                          const TiltedNodeLawT<S>& special,
                          const MarkedTree& tree, std::size_t first,
                          std::size_t last) {
  std::size_t z = last - first;
  S total(0);
  for (std::size_t u = first; u < last; ++u) {
    S term = special.prob_of(tree.out_degree(u), tree.mark(u));
    for (std::size_t v = first; v < last; ++v) {
      if (v == u) continue;
      term = term * normal.prob_of(tree.out_degree(v), tree.mark(v));
    }
    total += term;
  }
  return total / ScalarOps<S>::from_int(static_cast<long long>(z));
}

template <class S>
bool is_regular_tree(const MarkedTree& tree, std::uint32_t arity) {
  for (std::uint32_t g = 0; g < tree.height(); ++g) {
    auto [first, last] = tree.generation_range(g);
    for (std::size_t i = first; i < last; ++i) {
      if (tree.out_degree(i) != arity) return false;
    }
  }
  return true;
}

}  // namespace oracle_detail

template <class S>
S tilted_tree_probability(const MarkedGWLaw& law, const PenaltyRegime& regime,
                          const PenaltyTablesT<S>& tables,
                          const MarkedTree& tree) {
  const std::uint32_t n = tree.height();
  switch (regime.kind) {
    case RegimeKind::poly_sub: {
      auto exact_masses = compute_masses(tree);
      S prob(1);
      for (std::uint32_t g = 0; g < n; ++g) {
        auto [first, last] = tree.generation_range(g);
        if (first == last) break;  // extinct; nothing reproduces below
        std::size_t z = last - first;
        std::vector<S> masses(z);
        for (std::size_t i = 0; i < z; ++i) {
          masses[i] = ScalarOps<S>::from_rational(exact_masses.at(first + i));
        }
        S m_g = ScalarOps<S>::from_int(
            static_cast<long long>(tree.marks_below(g)));
        auto dist = gamma_type_distribution<S>(tables.xi, regime.ell, masses,
                                               m_g);
        // per node and type, the transition probability to (k_u, eta_u)
        std::vector<std::vector<S>> trans(z);
        for (std::size_t i = 0; i < z; ++i) {
          trans[i].resize(static_cast<std::size_t>(regime.ell) + 1);
          for (int t = 0; t <= regime.ell; ++t) {
            trans[i][static_cast<std::size_t>(t)] =
                oracle_detail::typed_transition_prob<S>(
                    law, tables.xi, t, masses[i],
                    tree.out_degree(first + i), tree.mark(first + i));
          }
        }
        S step(0);
        for (std::size_t v = 0; v < dist.vectors.size(); ++v) {
          S term = dist.probs[v];
          for (std::size_t i = 0; i < z; ++i) {
            term = term * trans[i][dist.vectors[v][i]];
          }
          step += term;
        }
        prob = prob * step;
      }
      return prob;
    }
    case RegimeKind::expo_positive: {
      auto normal = leafless_node_law<S>(law, tables.s_param, tables.kappa);
      if (regime.ell == 0) {
        S prob(1);
        for (std::uint32_t g = 0; g < n; ++g) {
          auto [first, last] = tree.generation_range(g);
          for (std::size_t i = first; i < last; ++i) {
            prob = prob * normal.prob_of(tree.out_degree(i), tree.mark(i));
          }
        }
        return prob;
      }
      auto special = spine_node_law<S>(law, tables.s_param, tables.kappa,
                                       tables.fprime_kappa);
      S prob(1);
      for (std::uint32_t g = 0; g < n; ++g) {
        auto [first, last] = tree.generation_range(g);
        if (first == last) return S(0);  // the spine never dies
        prob = prob * oracle_detail::spine_generation_factor<S>(
                          normal, special, tree, first, last);
      }
      if (tree.generation_size(n) == 0) return S(0);
      return prob;
    }
    case RegimeKind::expo_rary: {
      if (!oracle_detail::is_regular_tree<S>(tree, tables.r)) return S(0);
      auto node_law = rary_node_law<S>(law, tables.s_param, tables.r);
      S prob(1);
      for (std::uint32_t g = 0; g < n; ++g) {
        auto [first, last] = tree.generation_range(g);
        for (std::size_t i = first; i < last; ++i) {
          prob = prob * node_law.prob_of(tree.out_degree(i), tree.mark(i));
        }
      }
      return prob;
    }
    case RegimeKind::zero_mark: {
      auto normal = zero_mark_node_law<S>(law, tables.kappa_tilde);
      if (regime.ell == 0) {
        S prob(1);
        for (std::uint32_t g = 0; g < n; ++g) {
          auto [first, last] = tree.generation_range(g);
          for (std::size_t i = first; i < last; ++i) {
            prob = prob * normal.prob_of(tree.out_degree(i), tree.mark(i));
          }
        }
        return prob;
      }
      auto special = zero_mark_spine_node_law<S>(law, tables.kappa_tilde,
                                                 tables.psiprime_kappa_tilde);
      S prob(1);
      for (std::uint32_t g = 0; g < n; ++g) {
        auto [first, last] = tree.generation_range(g);
        if (first == last) return S(0);
        prob = prob * oracle_detail::spine_generation_factor<S>(
                          normal, special, tree, first, last);
      }
      if (tree.generation_size(n) == 0) return S(0);
      return prob;
    }
    case RegimeKind::zero_mark_rary: {
      if (!oracle_detail::is_regular_tree<S>(tree, tables.r_tilde)) {
        return S(0);
      }
      for (std::size_t i = 0; i < tree.size(); ++i) {
        if (tree.marked(i)) return S(0);
      }
      return S(1);  // Dirac mass at the unmarked regular tree
    }
    case RegimeKind::poly_crit:
    case RegimeKind::poly_super:
      fail(Errc::regime_mismatch,
           "no explicit tilted construction for " + regime.name() +
               "; only its martingale weight is implemented");
  }
  fail(Errc::regime_mismatch, "unknown regime");
}

}  // namespace mgw
