#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dpl {

namespace exit_code {
constexpr int kOk = 0;
constexpr int kTypeError = 1;
constexpr int kStuck = 2;
constexpr int kFuel = 3;
constexpr int kSyntax = 4;
constexpr int kProperty = 5;
/// Bad command line or unreadable input.
constexpr int kUsage = 6;
/// A broken internal invariant; always a bug.
constexpr int kInternal = 7;
}  // namespace exit_code

/// The `dpl` command. `args` excludes the program name. `in` is read when
/// FILE is "-".
int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace dpl
