#include "ztl/error.hpp"

namespace ztl {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::duplicate_symbol: return "DuplicateSymbol";
    case ErrorKind::dangling_arrow_endpoint: return "DanglingArrowEndpoint";
    case ErrorKind::empty_alphabet: return "EmptyAlphabet";
    case ErrorKind::inconsistent_word_set: return "InconsistentWordSet";
    case ErrorKind::empty_language: return "EmptyLanguage";
    case ErrorKind::no_circuit: return "NoCircuit";
    case ErrorKind::arrow_not_in_graph: return "ArrowNotInGraph";
    case ErrorKind::not_irreducible: return "NotIrreducible";
    case ErrorKind::symbol_not_in_alphabet: return "SymbolNotInAlphabet";
    case ErrorKind::divergent_series: return "DivergentSeries";
    case ErrorKind::inconsistent_heavy_component: return "InconsistentHeavyComponent";
    case ErrorKind::renormalized_not_irreducible: return "RenormalizedNotIrreducible";
    case ErrorKind::iteration_cap: return "IterationCap";
    case ErrorKind::bad_period_multiple: return "BadPeriodMultiple";
    case ErrorKind::degenerate_window: return "DegenerateWindow";
    case ErrorKind::convergence_failure: return "ConvergenceFailure";
    case ErrorKind::parse_error: return "ParseError";
  }
  return "Error";
}

}  // namespace ztl
