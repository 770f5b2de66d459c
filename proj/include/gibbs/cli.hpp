#ifndef GIBBS_CLI_HPP
#define GIBBS_CLI_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

namespace gibbs
{

enum ExitCode : int {
    exit_ok = 0,
    exit_spec_error = 2,
    exit_precondition = 3,
    exit_resource_cap = 4,
};

struct RunConfig {
    std::string subcommand;
    std::string spec_path;
    std::optional<std::size_t> truncation;
    std::uint64_t seed = 1;
    std::size_t samples = 1000;
    std::size_t streams = 1;
    std::size_t threads = 1;
    std::string out_dir = ".";
    std::string format = "csv";
};

// Reads a JSON spec file. Syntax errors are reported as spec_error with the
// line and column of the offending character.
nlohmann::json load_spec(const std::string &path);

int cmd_coeffs(const RunConfig &cfg, std::ostream &out);
int cmd_sample(const RunConfig &cfg, std::ostream &out);
int cmd_diagnose(const RunConfig &cfg, std::ostream &out);

// Dispatches cfg.subcommand and maps library errors to exit codes, printing
// the diagnostic on err.
int run(const RunConfig &cfg, std::ostream &out, std::ostream &err);

// Parses argv and runs.
int run_cli(int argc, char **argv, std::ostream &out, std::ostream &err);

} // namespace gibbs

#endif
