// SPDX-License-Identifier: MIT
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bernstein::cli {

enum class Status { ok, violated, indeterminate, error };

std::string to_string(Status s);

/// 0 ok, 2 violated, 3 indeterminate, 1 error.
int exit_code(Status s);

struct Verdict {
    std::string subcommand;
    Status status = Status::error;
    std::vector<std::string> artifacts;
    std::string message;
};

/// Runs one subcommand. args excludes the program name. Human-readable
/// output goes to out, diagnostics and usage to err.
Verdict run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bernstein::cli
