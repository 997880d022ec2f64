#pragma once

#include <stdexcept>
#include <string>

#include "zap/model.hpp"

namespace zap {

// Thrown for malformed input files; message names the offending line.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reads a headered CSV with exactly one of the columns `z` or `u` plus
// optional covariate columns x1..xp (consecutively numbered).  u-values on
// the closed boundary are clamped with a warning on stderr.
TestingInput parse_input_csv(const std::string& path);

// JSON round-trip of the working-model coefficients.
std::string params_to_json(const BetaMixtureParams& params);
BetaMixtureParams params_from_json(const std::string& text);
void write_params_json(const std::string& path, const BetaMixtureParams& params);
BetaMixtureParams read_params_json(const std::string& path);

// Shortest round-trip decimal representation, stable across runs.
std::string format_double(double v);

}  // namespace zap
