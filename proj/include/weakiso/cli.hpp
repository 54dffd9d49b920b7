#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace weakiso {

inline constexpr const char* kToolVersion = "1.0.0";

// One tool invocation, arguments without the program name. Every subcommand
// prints a run document (schema, manifest, result) on out; reruns with the
// same arguments are byte-identical. Exit codes: 0 success, 1 usage or bad
// input, 2 search exhausted, 3 certificate or integrity failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace weakiso
