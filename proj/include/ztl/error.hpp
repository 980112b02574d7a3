#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ztl {

enum class ErrorKind {
  duplicate_symbol,
  dangling_arrow_endpoint,
  empty_alphabet,
  inconsistent_word_set,
  empty_language,
  no_circuit,
  arrow_not_in_graph,
  not_irreducible,
  symbol_not_in_alphabet,
  divergent_series,
  inconsistent_heavy_component,
  renormalized_not_irreducible,
  iteration_cap,
  bad_period_multiple,
  degenerate_window,
  convergence_failure,
  parse_error,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ztl
