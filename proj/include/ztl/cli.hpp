#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ztl {

enum ExitCode : int { exit_ok = 0, exit_other = 1, exit_parse = 2, exit_no_circuit = 3, exit_irreducibility = 4, exit_property = 5 };

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "0.5,1,2" or "log2:1..6".
std::vector<double> parse_betas(const std::string& text);

// Best rational p/q with q <= max_den when it reproduces x to 1e-12, else "".
std::string as_fraction(double x, long max_den = 1000);

}  // namespace ztl
