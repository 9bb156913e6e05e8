#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qge::cli {

// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "QGE_OUTPUT_DIR";

enum ExitCode : int { ok = 0, usage = 2, physics = 3 };

// args excludes the program name. Failures print one JSON error record on err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args);

}  // namespace qge::cli
