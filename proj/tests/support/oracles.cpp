#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>

namespace kta::test {

namespace {

const std::map<std::string, int>& abi_names() {
    static const std::map<std::string, int> names = {
        {"zero", 0}, {"at", 1},  {"v0", 2},  {"v1", 3},  {"a0", 4},  {"a1", 5},  {"a2", 6},  {"a3", 7},
        {"t0", 8},   {"t1", 9},  {"t2", 10}, {"t3", 11}, {"t4", 12}, {"t5", 13}, {"t6", 14}, {"t7", 15},
        {"s0", 16},  {"s1", 17}, {"s2", 18}, {"s3", 19}, {"s4", 20}, {"s5", 21}, {"s6", 22}, {"s7", 23},
        {"t8", 24},  {"t9", 25}, {"k0", 26}, {"k1", 27}, {"gp", 28}, {"sp", 29}, {"fp", 30}, {"s8", 30},
        {"ra", 31}};
    return names;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::string canonical_register(const std::string& tok) {
    const std::string name = tok.substr(1);
    if (!name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) { return std::isdigit(c); })) {
        return "r" + name;
    }
    const auto it = abi_names().find(name);
    if (it == abi_names().end()) {
        throw std::invalid_argument("unknown register " + tok);
    }
    return "r" + std::to_string(it->second);
}

std::string canonical_operand(const std::string& tok) {
    if (tok.empty()) {
        throw std::invalid_argument("empty operand");
    }
    if (tok[0] == '$') {
        return canonical_register(tok);
    }
    return std::to_string(std::stoll(tok, nullptr, 0));
}

const std::string kZero = "r0";
const std::string kRa = "r31";

} // namespace

std::string CanonicalAsm::to_string() const {
    std::string out = mnemonic;
    for (size_t i = 0; i < operands.size(); ++i) {
        out += (i == 0 ? " " : ", ") + operands[i];
    }
    return out;
}

CanonicalAsm canonicalize(const std::string& mnemonic, const std::string& operands) {
    CanonicalAsm out{mnemonic, {}};
    std::stringstream in(operands);
    std::string part;
    while (std::getline(in, part, ',')) {
        part = trim(part);
        const auto open = part.find('(');
        if (open != std::string::npos) {
            const auto close = part.find(')', open);
            const std::string offset = trim(part.substr(0, open));
            out.operands.push_back(offset.empty() ? "0" : canonical_operand(offset));
            out.operands.push_back(canonical_register(trim(part.substr(open + 1, close - open - 1))));
        } else if (!part.empty()) {
            out.operands.push_back(canonical_operand(part));
        }
    }
    return out;
}

std::vector<CanonicalAsm> expand_aliases(const CanonicalAsm& ref) {
    const auto& m = ref.mnemonic;
    const auto& o = ref.operands;
    if (m == "nop") {
        return {{"sll", {kZero, kZero, "0"}}};
    }
    if (m == "move" && o.size() == 2) {
        return {{"or", {o[0], o[1], kZero}}, {"addu", {o[0], o[1], kZero}}};
    }
    if (m == "beqz" && o.size() == 2) {
        return {{"beq", {o[0], kZero, o[1]}}};
    }
    if (m == "bnez" && o.size() == 2) {
        return {{"bne", {o[0], kZero, o[1]}}};
    }
    if (m == "b" && o.size() == 1) {
        return {{"beq", {kZero, kZero, o[0]}}};
    }
    if (m == "bal" && o.size() == 1) {
        return {{"bgezal", {kZero, o[0]}}};
    }
    if (m == "negu" && o.size() == 2) {
        return {{"subu", {o[0], kZero, o[1]}}};
    }
    if (m == "neg" && o.size() == 2) {
        return {{"sub", {o[0], kZero, o[1]}}};
    }
    if (m == "not" && o.size() == 2) {
        return {{"nor", {o[0], o[1], kZero}}};
    }
    if (m == "jalr" && o.size() == 1) {
        return {{"jalr", {kRa, o[0]}}};
    }
    if ((m == "div" || m == "divu") && o.size() == 3 && o[0] == kZero) {
        return {{m, {o[1], o[2]}}};
    }
    return {ref};
}

Cycles replay_cost(const std::vector<ExecutedWord>& trace, const TimingModel& model) {
    Cycles total = 0;
    for (size_t i = 0; i < trace.size(); ++i) {
        const Word w = trace[i].word;
        const unsigned opcode = w >> 26;
        const unsigned funct = w & 0x3f;
        const Instruction instr = decode(w);
        const auto m = mnemonic_of(instr);
        if (!m) {
            throw std::invalid_argument("trace contains an unsupported word");
        }
        Cycles c = model.base_cost(*m);
        const bool cond = opcode == 0x04 || opcode == 0x05 || opcode == 0x06 || opcode == 0x07 || opcode == 0x01;
        const bool jump = opcode == 0x02 || opcode == 0x03 || (opcode == 0 && (funct == 0x08 || funct == 0x09));
        if (jump) {
            c += model.branch_taken_extra();
        } else if (cond && i + 2 < trace.size() && trace[i + 2].pc != trace[i].pc + 8) {
            c += model.branch_taken_extra();
        }
        if (opcode >= 0x20 && opcode <= 0x2b) {
            c += model.memory_access_extra();
        }
        if (opcode == 0 && funct >= 0x18 && funct <= 0x1b) {
            c += model.muldiv_cost();
        }
        total += c;
    }
    return total;
}

std::vector<Cycles> raw_pair_deltas(const std::vector<TimingEvent>& events, const std::string& from,
                                    const std::string& to) {
    std::vector<Cycles> out;
    for (size_t i = 0; i < events.size(); ++i) {
        if (events[i].id != from) {
            continue;
        }
        for (size_t j = i + 1; j < events.size(); ++j) {
            if (events[j].id == to) {
                out.push_back(events[j].cycles - events[i].cycles);
                break;
            }
        }
    }
    return out;
}

ExhaustiveOracle brute_force(const Simulator& sim, Address entry, const InputSpace& space, uint64_t step_budget) {
    ExhaustiveOracle o;
    bool first = true;
    for (const auto& b : enumerate(space)) {
        const RunResult r = sim.run(entry, b, step_budget);
        ++o.runs;
        if (r.status != RunStatus::Finished) {
            o.faulted = true;
            continue;
        }
        if (first || r.total_cycles > o.max) {
            o.max = r.total_cycles;
            o.argmax = b;
        }
        if (first || r.total_cycles < o.min) {
            o.min = r.total_cycles;
        }
        first = false;
    }
    return o;
}

InputSpace random_subspace(const InputSpace& space, std::mt19937_64& rng) {
    std::vector<Dimension> dims = space.dims();
    for (auto& d : dims) {
        std::uniform_int_distribution<int64_t> pick(d.lo, d.hi);
        int64_t a = pick(rng);
        int64_t b = pick(rng);
        if (a > b) {
            std::swap(a, b);
        }
        d.lo = a;
        d.hi = b;
    }
    return InputSpace(std::move(dims));
}

InputBinding random_binding(const InputSpace& space, std::mt19937_64& rng) {
    InputBinding b;
    for (const auto& d : space.dims()) {
        std::uniform_int_distribution<int64_t> pick(d.lo, d.hi);
        b.emplace_back(d.location, value_word(pick(rng)));
    }
    return b;
}

InputSpace Benchmark::space() const {
    std::vector<Dimension> dims;
    for (const auto& expr : inputs) {
        dims.push_back(InputSpace::parse_dimension(expr));
    }
    return InputSpace(std::move(dims));
}

const std::vector<Benchmark>& optimality_benchmarks() {
    static const std::vector<Benchmark> list = {
        {"countdown", "countdown", {"a0=0..255"}},
        {"branches", "absval", {"a0=-100..100"}},
        {"branches", "min2", {"a0=-20..20", "a1=-20..20"}},
        {"branches", "max2", {"a0=-20..20", "a1=-20..20"}},
        {"classify", "classify", {"a0=0..65535:unsigned"}},
        {"nested", "nested", {"a0=0..15", "a1=0..15"}},
        {"isort",
         "isort",
         {"mem:0x004200d0=0..3", "mem:0x004200d4=0..3", "mem:0x004200d8=0..3", "mem:0x004200dc=0..3"}},
        {"saturate", "sat_add8", {"a0=-128..127", "a1=-128..127"}},
    };
    return list;
}

const std::vector<Benchmark>& soundness_benchmarks() {
    static const std::vector<Benchmark> list = {
        {"bits", "popcount", {"a0=0..4095:unsigned"}},
        {"bits", "bytes", {"a0=0..100000:unsigned"}},
        {"bits", "gcd", {"a0=1..40:unsigned", "a1=0..40:unsigned"}},
        {"bits", "divmix", {"a0=-50..50", "a1=-50..50"}},
        {"branches", "absval", {"a0=-100..100"}},
        {"branches", "min2", {"a0=-20..20", "a1=-20..20"}},
        {"calls", "calls", {"a0=-100..100", "a1=0..10"}},
        {"classify", "classify", {"a0=0..65535:unsigned"}},
        {"countdown", "countdown", {"a0=-5..255"}},
        {"isort",
         "isort",
         {"mem:0x004200d0=-3..3", "mem:0x004200d4=-3..3", "mem:0x004200d8=-3..3", "mem:0x004200dc=-3..3"}},
        {"nested", "nested", {"a0=0..8", "a1=0..8"}},
        {"saturate", "sat_add8", {"a0=-128..127", "a1=-128..127"}},
        {"ops", "ops_all", {"a0=-20..20", "a1=-20..20"}},
        {"ops", "diamond", {"a0=-5..5"}},
        {"tpoints", "tpoints", {"a0=0..20"}},
    };
    return list;
}

} // namespace kta::test
