#include "cli.hpp"

#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "kta/cfg.hpp"
#include "kta/exhaustive.hpp"
#include "kta/loader.hpp"
#include "kta/report.hpp"
#include "kta/search.hpp"
#include "kta/sim.hpp"

namespace kta::cli {

namespace {

constexpr int kOk = 0;
constexpr int kAnalysisError = 1;
constexpr int kUsageError = 2;

// Failures that the user fixes by changing the invocation or its inputs.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string hex(Address a) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", a);
    return buf;
}

void add_common(CLI::App* app, CliConfig& c) {
    app->add_option("--timing", c.timing_path, "Timing model configuration file");
    app->add_option("--format", c.format, "Output format")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"text", Format::Text}, {"json", Format::Json}}));
    app->add_option("--out", c.out_path, "Write output to this file");
    app->add_option("--step-budget", c.step_budget, "Maximum simulated instructions per run")
        ->check(CLI::PositiveNumber);
    app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
}

TimingModel load_model(const CliConfig& c) {
    if (c.timing_path.empty()) {
        return TimingModel{};
    }
    std::ifstream in(c.timing_path);
    if (!in) {
        throw ConfigError("cannot read timing configuration " + c.timing_path);
    }
    std::stringstream text;
    text << in.rdbuf();
    return parse_timing_config(text.str());
}

InputSpace parse_space(const CliConfig& c) {
    std::vector<Dimension> dims;
    for (const auto& expr : c.inputs) {
        dims.push_back(InputSpace::parse_dimension(expr));
    }
    return InputSpace(std::move(dims));
}

TimingPointTable timing_points(const LoadedProgram& prog, const CliConfig& c) {
    TimingPointTable table = timing_points_from_symbols(prog);
    for (const auto& tp : c.timing_points) {
        const auto eq = tp.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw UsageError("--tp expects name=0xADDR, got '" + tp + "'");
        }
        try {
            size_t used = 0;
            const std::string addr = tp.substr(eq + 1);
            const unsigned long v = std::stoul(addr, &used, 0);
            if (used != addr.size() || v > 0xffffffffUL) {
                throw std::invalid_argument(addr);
            }
            table[tp.substr(0, eq)] = static_cast<Address>(v);
        } catch (const std::logic_error&) {
            throw UsageError("bad address in --tp '" + tp + "'");
        }
    }
    return table;
}

std::vector<TimingQuery> parse_queries(const CliConfig& c) {
    std::vector<TimingQuery> out;
    for (const auto& q : c.queries) {
        const auto comma = q.find(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 == q.size()) {
            throw UsageError("--query expects from,to, got '" + q + "'");
        }
        out.emplace_back(q.substr(0, comma), q.substr(comma + 1));
    }
    return out;
}

void write_json(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

int do_disasm(const CliConfig& c, const LoadedProgram& prog, std::ostream& out) {
    std::vector<const Symbol*> funcs;
    if (!c.function.empty()) {
        auto it = prog.symbols().find(c.function);
        if (it == prog.symbols().end()) {
            throw ConfigError("unknown function symbol '" + c.function + "'");
        }
        funcs.push_back(&it->second);
    } else {
        funcs = prog.functions();
    }
    Json all = Json::array();
    for (const Symbol* f : funcs) {
        Json fj = {{"name", f->name}, {"address", hex(f->address)}, {"instructions", Json::array()}};
        if (c.format == Format::Text) {
            out << f->name << ":\n";
        }
        for (Address a = f->address, end = function_extent_end(prog, *f); a < end; a += 4) {
            const Word w = read_word(prog, a);
            const std::string text = disassemble(decode(w), a);
            if (c.format == Format::Text) {
                out << "  " << hex(a) << "  " << hex(w) << "  " << text << "\n";
            } else {
                fj["instructions"].push_back({{"pc", hex(a)}, {"word", hex(w)}, {"text", text}});
            }
        }
        all.push_back(std::move(fj));
    }
    if (c.format == Format::Json) {
        write_json(out, {{"functions", all}});
    }
    return kOk;
}

int do_cfg(const CliConfig& c, const LoadedProgram& prog, std::ostream& out) {
    const Cfg cfg = build_cfg(prog, c.function);
    if (!c.dot_path.empty()) {
        std::ofstream dot(c.dot_path);
        if (!dot) {
            throw ConfigError("cannot write " + c.dot_path);
        }
        dot << to_dot(cfg);
    }
    if (c.format == Format::Json) {
        Json blocks = Json::array();
        for (const auto& [start, bb] : cfg.blocks) {
            Json succs = Json::array();
            for (Address s : bb.succs) {
                succs.push_back(hex(s));
            }
            Json instrs = Json::array();
            for (const auto& pi : bb.instrs) {
                instrs.push_back({{"pc", hex(pi.pc)}, {"text", disassemble(pi.instr, pi.pc)}});
            }
            Json bj = {{"start", hex(start)},
                       {"end", hex(bb.end())},
                       {"terminator", control_class_name(bb.terminator)},
                       {"succs", succs},
                       {"instructions", instrs}};
            if (bb.callee) {
                bj["callee"] = hex(*bb.callee);
            }
            blocks.push_back(std::move(bj));
        }
        write_json(out, {{"function", cfg.function}, {"entry", hex(cfg.entry)}, {"blocks", blocks}});
    } else if (c.dot_path.empty()) {
        out << to_dot(cfg);
    } else {
        out << cfg.function << ": " << cfg.blocks.size() << " blocks written to " << c.dot_path << "\n";
    }
    return kOk;
}

int do_sim(const CliConfig& c, const LoadedProgram& prog, const TimingModel& model, std::ostream& out) {
    InputBinding binding;
    const InputSpace space = parse_space(c);
    for (const auto& d : space.dims()) {
        if (d.lo != d.hi) {
            throw UsageError("sim takes single values only, got a range for " + d.location.to_string());
        }
        binding.emplace_back(d.location, value_word(d.lo));
    }
    std::ofstream trace_file;
    TraceSink sink;
    if (!c.trace_path.empty()) {
        trace_file.open(c.trace_path);
        if (!trace_file) {
            throw ConfigError("cannot write " + c.trace_path);
        }
        sink = [&trace_file](const TraceEntry& e) { trace_file << format_trace_line(e) << "\n"; };
    }
    const Simulator sim(prog, model);
    const RunResult r = sim.run(symbol_address(prog, c.function), binding, c.step_budget,
                                timing_points(prog, c), sink);
    if (c.format == Format::Json) {
        Json events = Json::array();
        for (const auto& e : r.tp_events) {
            events.push_back({{"id", e.id}, {"cycles", e.cycles}});
        }
        Json j = {{"status", run_status_name(r.status)},
                  {"total_cycles", r.total_cycles},
                  {"steps", r.steps},
                  {"return_value", r.return_value},
                  {"tp_events", events}};
        if (r.fault) {
            j["fault"] = {{"kind", fault_kind_name(r.fault->kind)},
                          {"pc", hex(r.fault->pc)},
                          {"message", r.fault->message}};
        }
        write_json(out, j);
    } else {
        out << "status " << run_status_name(r.status) << "\n";
        if (r.fault) {
            out << "fault " << fault_kind_name(r.fault->kind) << " at " << hex(r.fault->pc) << ": "
                << r.fault->message << "\n";
        }
        out << "cycles " << r.total_cycles << "\n";
        out << "steps " << r.steps << "\n";
        out << "return " << static_cast<int32_t>(r.return_value) << "\n";
        for (const auto& e : r.tp_events) {
            out << "tp " << e.id << " " << e.cycles << "\n";
        }
    }
    return r.status == RunStatus::Finished ? kOk : kAnalysisError;
}

int do_exhaustive(const CliConfig& c, const LoadedProgram& prog, const TimingModel& model, std::ostream& out) {
    ExhaustiveOptions opts;
    opts.step_budget = c.step_budget;
    opts.jobs = c.jobs;
    const FineGrainedReport report =
        analyze(prog, model, c.function, parse_space(c), timing_points(prog, c), parse_queries(c), opts);
    if (c.format == Format::Json) {
        write_json(out, to_json(report));
    } else {
        out << to_text(report);
    }
    return kOk;
}

int do_wcet(const CliConfig& c, const LoadedProgram& prog, const TimingModel& model, std::ostream& out) {
    const InputSpace space = parse_space(c);
    SearchOptions opts;
    opts.step_budget = c.step_budget;
    opts.jobs = c.jobs;
    opts.merge = c.merge;
    const SearchResult r = optimal_wcet(prog, model, c.function, space, c.max_time, opts);
    if (c.format == Format::Json) {
        write_json(out, to_json(r, space));
    } else {
        out << to_text(r, space);
    }
    return r.status == SearchStatus::Optimal ? kOk : kAnalysisError;
}

int dispatch(const CliConfig& c, std::ostream& out) {
    const TimingModel model = load_model(c);
    const LoadedProgram prog = load_file(c.elf_path);
    switch (c.command) {
    case Command::Disasm: return do_disasm(c, prog, out);
    case Command::Cfg: return do_cfg(c, prog, out);
    case Command::Sim: return do_sim(c, prog, model, out);
    case Command::Exhaustive: return do_exhaustive(c, prog, model, out);
    case Command::Wcet: return do_wcet(c, prog, model, out);
    }
    return kUsageError;
}

} // namespace

CliConfig parse_args(int argc, const char* const* argv) {
    CliConfig c;
    CLI::App app{"Timing analysis for MIPS32 ELF executables", "kta"};
    app.require_subcommand(1);
    add_common(&app, c);

    auto with_elf = [&](CLI::App* sub) {
        sub->add_option("elf", c.elf_path, "ELF executable")->required();
        add_common(sub, c);
    };

    CLI::App* disasm = app.add_subcommand("disasm", "Disassemble functions");
    with_elf(disasm);
    disasm->add_option("--func", c.function, "Only this function");

    CLI::App* cfg = app.add_subcommand("cfg", "Reconstruct a function's control-flow graph");
    with_elf(cfg);
    cfg->add_option("--func", c.function, "Function symbol")->required();
    cfg->add_option("--dot", c.dot_path, "Write Graphviz output to this file");

    CLI::App* sim = app.add_subcommand("sim", "Simulate one run");
    with_elf(sim);
    sim->add_option("--func", c.function, "Function symbol")->required();
    sim->add_option("--input", c.inputs, "<loc>=<value>")->take_all();
    sim->add_option("--tp", c.timing_points, "Extra timing point name=0xADDR");
    sim->add_option("--trace", c.trace_path, "Write a per-instruction trace to this file");

    CLI::App* exhaustive = app.add_subcommand("exhaustive", "Simulate every input and report timing-point bounds");
    with_elf(exhaustive);
    exhaustive->add_option("--func", c.function, "Function symbol")->required();
    exhaustive->add_option("--input", c.inputs, "<loc>=<lo>..<hi>[:signed|:unsigned]");
    exhaustive->add_option("--tp", c.timing_points, "Extra timing point name=0xADDR");
    exhaustive->add_option("--query", c.queries, "Timing-point pair from,to");

    CLI::App* wcet = app.add_subcommand("wcet", "Compute the optimal WCET by abstract search");
    with_elf(wcet);
    wcet->add_option("--func", c.function, "Function symbol")->required();
    wcet->add_option("--input", c.inputs, "<loc>=<lo>..<hi>[:signed|:unsigned]");
    wcet->add_option("--max-time", c.max_time, "Cycle budget")->required()->check(CLI::PositiveNumber);
    wcet->add_option("--merge", c.merge, "State merging")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, MergePolicy>{{"none", MergePolicy::None}, {"block-entry", MergePolicy::BlockEntry}}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    const std::vector<std::pair<CLI::App*, Command>> commands = {{disasm, Command::Disasm},
                                                                 {cfg, Command::Cfg},
                                                                 {sim, Command::Sim},
                                                                 {exhaustive, Command::Exhaustive},
                                                                 {wcet, Command::Wcet}};
    for (const auto& [sub, cmd] : commands) {
        if (sub->parsed()) {
            c.command = cmd;
        }
    }
    return c;
}

int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.out_path.empty()) {
            return dispatch(config, out);
        }
        std::ostringstream buffer;
        const int code = dispatch(config, buffer);
        std::ofstream file(config.out_path);
        if (!file) {
            throw ConfigError("cannot write " + config.out_path);
        }
        file << buffer.str();
        return code;
    } catch (const UsageError& e) {
        err << "kta: " << e.what() << "\n";
        return kUsageError;
    } catch (const ConfigError& e) {
        err << "kta: " << e.what() << "\n";
        return kUsageError;
    } catch (const LoadError& e) {
        err << "kta: " << e.what() << "\n";
        return kUsageError;
    } catch (const TimingError& e) {
        err << "kta: " << config.timing_path << ": " << e.what() << "\n";
        return kUsageError;
    } catch (const CfgError& e) {
        err << "kta: " << e.what() << "\n";
        return e.kind() == CfgError::Kind::UnknownSymbol ? kUsageError : kAnalysisError;
    } catch (const InputError& e) {
        err << "kta: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "kta: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "kta: " << e.what() << "\n";
        return kAnalysisError;
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CliConfig config;
    try {
        config = parse_args(argc, argv);
    } catch (const HelpRequested& h) {
        out << h.what();
        return kOk;
    } catch (const UsageError& e) {
        err << "kta: " << e.what() << "\n";
        return kUsageError;
    }
    return run(config, out, err);
}

} // namespace kta::cli
