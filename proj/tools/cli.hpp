#pragma once

#include <ostream>

namespace cobra {

// Exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cobra
