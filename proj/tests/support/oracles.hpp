#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kta/exhaustive.hpp"
#include "kta/sim.hpp"

namespace kta::test {

// Canonical operand form shared by both sides of the disassembly
// cross-check: registers become "r<N>", immediates decimal integers, and
// `off(base)` expands to two operands.
struct CanonicalAsm {
    std::string mnemonic;
    std::vector<std::string> operands;
    bool operator==(const CanonicalAsm&) const = default;
    std::string to_string() const;
};

CanonicalAsm canonicalize(const std::string& mnemonic, const std::string& operands);
// The reference disassembler prints pseudo-instructions; each expands to the
// machine forms it may stand for.
std::vector<CanonicalAsm> expand_aliases(const CanonicalAsm& ref);

// One executed instruction as seen from the outside: its address and word.
struct ExecutedWord {
    Address pc = 0;
    Word word = 0;
};

// Cost of a trace computed from the model's parameters alone. A conditional
// branch counts as taken iff the instruction after its delay slot is not at
// pc + 8.
Cycles replay_cost(const std::vector<ExecutedWord>& trace, const TimingModel& model);

// Deltas from each `from` event to the next later `to` event.
std::vector<Cycles> raw_pair_deltas(const std::vector<TimingEvent>& events, const std::string& from,
                                    const std::string& to);

struct ExhaustiveOracle {
    Cycles max = 0;
    Cycles min = 0;
    InputBinding argmax;
    uint64_t runs = 0;
    bool faulted = false;
};

// Brute-force maximum and minimum of sim.run over the whole space.
ExhaustiveOracle brute_force(const Simulator& sim, Address entry, const InputSpace& space,
                             uint64_t step_budget = 10'000'000);

// Uniform random sub-rectangle of a space.
InputSpace random_subspace(const InputSpace& space, std::mt19937_64& rng);
InputBinding random_binding(const InputSpace& space, std::mt19937_64& rng);

// A benchmark: fixture, function and input space, with an optional timing
// model override.
struct Benchmark {
    std::string fixture;
    std::string function;
    std::vector<std::string> inputs;
    InputSpace space() const;
};

// The optimality benchmark set.
const std::vector<Benchmark>& optimality_benchmarks();
// Fault-free inputs over which the soundness properties are sampled; at least
// ten fixtures are represented.
const std::vector<Benchmark>& soundness_benchmarks();

} // namespace kta::test
