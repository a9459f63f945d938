#pragma once

#include <complex>
#include <string>
#include <vector>

namespace coqkd::cli {

/// Inclusive grid syntax: "start:stop:step" (endpoints within 1e-12), a
/// comma-separated list, or a single value.
std::vector<double> parse_grid(const std::string& text);

/// Complex literals "re", "re+imi", "re-imi" (e.g. "0.3+0.4i").
std::complex<double> parse_complex(const std::string& text);

/// Entry point used by the binary and by tests; returns the exit status.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace coqkd::cli
