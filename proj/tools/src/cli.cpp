// SPDX-License-Identifier: MIT
#include "bernstein/cli.hpp"

#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "bernstein/error.hpp"
#include "commands.hpp"

namespace bernstein::cli {

std::string to_string(Status s) {
    switch (s) {
        case Status::ok: return "ok";
        case Status::violated: return "violated";
        case Status::indeterminate: return "indeterminate";
        case Status::error: return "error";
    }
    return "error";
}

int exit_code(Status s) {
    switch (s) {
        case Status::ok: return 0;
        case Status::violated: return 2;
        case Status::indeterminate: return 3;
        case Status::error: return 1;
    }
    return 1;
}

namespace {

struct Flags {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<std::string> overrides;
    std::string grid;
};

Verdict failed(const std::string& sub, const std::string& message) {
    Verdict v;
    v.subcommand = sub;
    v.status = Status::error;
    v.message = message;
    return v;
}

}  // namespace

Verdict run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Local gradient bounds by the weak Bernstein method", "bernstein"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", BERNSTEIN_VERSION);
    Flags flags;

    struct Sub {
        const char* name;
        const char* help;
        Verdict (*fn)(const Context&);
    };
    const std::vector<Sub> subs{
        {"auxfun", "tabulate phi, psi and the localization C as CSV", cmd_auxfun},
        {"check", "structure-condition certificate: smallest certified L", cmd_check},
        {"extract", "Lipschitz constant of a grid file by doubling of variables", cmd_extract},
        {"solve", "finite-difference solve of the configured equation", cmd_solve},
        {"verify", "solve, extract and check, then compare the bounds", cmd_verify},
        {"lemma", "g-path property suite at the certified L", cmd_lemma},
    };
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", flags.config, "run-config file")->required();
        sub->add_option("--out", flags.out, "output directory")->capture_default_str();
        sub->add_option("--seed", flags.seed, "seed for sampling")->capture_default_str();
        sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::Range(1, 256))->capture_default_str();
        sub->add_option("--set", flags.overrides, "override section.key=value");
        if (std::string(s.name) == "extract") sub->add_option("--grid", flags.grid, "grid file (overrides extract.grid)");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        Verdict v;
        v.status = Status::ok;
        return v;
    } catch (const CLI::CallForVersion&) {
        out << BERNSTEIN_VERSION << "\n";
        Verdict v;
        v.status = Status::ok;
        return v;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return failed("", e.what());
    }

    const CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    const Sub* target = nullptr;
    for (const auto& s : subs) {
        if (name == s.name) target = &s;
    }
    try {
        std::ifstream in(flags.config);
        if (!in) throw ValidationError("cannot open config '" + flags.config + "'");
        Context ctx;
        ctx.cfg = parse_run_config(in, flags.overrides);
        ctx.out_dir = flags.out;
        ctx.seed = flags.seed;
        ctx.threads = flags.threads;
        ctx.grid = flags.grid;
        ctx.log = &out;
        std::filesystem::create_directories(ctx.out_dir);
        return target->fn(ctx);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return failed(name, e.what());
    }
}

}  // namespace bernstein::cli
