// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "bernstein/cli.hpp"
#include "bernstein/run_config.hpp"

namespace bernstein::cli {

struct Context {
    RunConfig cfg;
    std::filesystem::path out_dir;
    std::uint64_t seed = 1;
    int threads = 1;
    /// extract: grid file, overriding extract.grid.
    std::string grid;
    std::ostream* log = nullptr;
};

Verdict cmd_auxfun(const Context& ctx);
Verdict cmd_check(const Context& ctx);
Verdict cmd_extract(const Context& ctx);
Verdict cmd_solve(const Context& ctx);
Verdict cmd_verify(const Context& ctx);
Verdict cmd_lemma(const Context& ctx);

}  // namespace bernstein::cli
