#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fasim/simulate.hpp"

namespace fasim::cli {

/// Runs one subcommand. Exit codes: 0 success, 1 invalid input (one JSON line
/// on `err`), 2 internal failure.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// flag value parsers, exposed for tests
NoiseSpec parse_noise(const std::string& text);
void parse_u_structure(const std::string& text, DgpConfig& cfg);
std::optional<OutlierSpec> parse_outliers(const std::string& text);
std::vector<double> parse_list(const std::string& text);

}  // namespace fasim::cli
