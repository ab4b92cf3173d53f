#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kta/absint.hpp"
#include "kta/timing.hpp"

namespace kta::cli {

enum class Command { Disasm, Cfg, Sim, Exhaustive, Wcet };
enum class Format { Text, Json };

struct CliConfig {
    Command command = Command::Disasm;
    std::string elf_path;
    std::string function;
    std::string timing_path;
    std::vector<std::string> inputs;
    std::vector<std::string> timing_points;
    std::vector<std::string> queries;
    Cycles max_time = 0;
    uint64_t step_budget = 10'000'000;
    MergePolicy merge = MergePolicy::None;
    Format format = Format::Text;
    std::string out_path;
    std::string dot_path;
    std::string trace_path;
    unsigned jobs = 1;
};

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Thrown by parse_args for --help; carries the help text.
class HelpRequested : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

CliConfig parse_args(int argc, const char* const* argv);

// Exit status: 0 success, 1 analysis error, 2 usage or configuration error.
int run(const CliConfig& config, std::ostream& out, std::ostream& err);

// parse_args + run with error reporting.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace kta::cli
