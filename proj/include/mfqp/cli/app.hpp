#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mfqp::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;

//! Entry point shared by the executable and the in-process tests.
//! args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

} // namespace mfqp::cli
