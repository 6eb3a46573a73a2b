#pragma once

#include <iosfwd>

namespace sharpiv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr int kSummarySchemaVersion = 1;

/// Entry point for the `sharpiv` tool. Reports go to `out`, diagnostics and
/// structured errors to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sharpiv::cli
