#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cupgeo/point.hpp"
#include "cupgeo/tensor.hpp"

namespace cupgeo {

enum ExitCode : int { kExitPass = 0, kExitCheckFailure = 1, kExitUsage = 2 };

/// Runs one command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "0.5,1" -> Point{0.5, 1}. Throws ConfigError on malformed input.
Point parse_point(std::string_view text);

/// Nested JSON arrays, slot 0 outermost; a rank-0 tensor is a bare number.
std::string tensor_to_json(const Tensor& t);
Tensor tensor_from_json(std::string_view text, std::vector<Slot> variance);

/// Component label such as "Gamma^sigma_{mu mu}".
std::string component_label(std::string_view symbol, const std::vector<Slot>& variance,
                            std::span<const std::size_t> index, const std::vector<std::string>& coords);

}  // namespace cupgeo
