#pragma once

#include <stdexcept>
#include <string>

namespace mgw {

// Error codes for every failure mode the library reports. The CLI maps
// `usage` to exit code 2; everything else surfaces as a diagnostic.
enum class Errc {
  missing_parent,
  contiguity_violation,
  marked_leaf_at_horizon,
  horizon_exceeds_tree,
  not_a_probability,
  degenerate,
  no_mark_possible,
  unsupported_infinite_support,
  order_too_large,
  not_subcritical,
  wrong_criticality,
  regime_mismatch,
  inconsistent_masses,
  too_many_type_vectors,
  not_normalizable,
  state_space_too_large,
  node_budget_exceeded,
  parse,
  usage,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mgw
