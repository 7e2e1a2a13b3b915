#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "rg/game.hpp"

namespace rg {

enum ExitCode { kExitOk = 0, kExitAuditFail = 1, kExitError = 2 };

// Cache root: $RG_CACHE_DIR when set, else the flag value, else ~/.cache/rgtool.
std::string resolve_cache_dir(const std::string& flag_value);

// Exact literal: "a/b", an integer, or a decimal such as 0.001 or 1e-3.
Rational parse_exact_number(const std::string& text);

struct SuiteResult {
  bool pass = true;
  std::string text;
};

// The property suite behind `verify`: audit, recursion against the oracle, probes, replay,
// and both guarantee checks.
SuiteResult verify_suite(const GameSpec& spec, const InitialLaw& pi);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rg
