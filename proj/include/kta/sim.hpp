#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "kta/inputs.hpp"
#include "kta/isa.hpp"
#include "kta/loader.hpp"
#include "kta/timing.hpp"

namespace kta {

// Return address installed in $31 at entry; reaching it ends the run.
inline constexpr Address kExitSentinel = 0xffff0000;

struct SimConfig {
    Address stack_top = 0x7fff0000;
    uint32_t stack_size = 64 * 1024;

    Address stack_base() const { return stack_top - stack_size; }
    bool in_stack(Address a) const { return a >= stack_base() && a < stack_top; }
};

enum class FaultKind {
    UnsupportedInstruction,
    Overflow,
    UnmappedAddress,
    MisalignedAccess,
    DivideByZero,
    BranchInDelaySlot,
};

std::string_view fault_kind_name(FaultKind k);

class SimFault : public std::runtime_error {
  public:
    SimFault(FaultKind kind, Address pc, const std::string& what)
        : std::runtime_error(what), kind_(kind), pc_(pc) {}
    FaultKind kind() const { return kind_; }
    Address pc() const { return pc_; }

  private:
    FaultKind kind_;
    Address pc_;
};

// Raised by init_state for bindings the simulator cannot apply.
class SimError : public std::runtime_error {
  public:
    enum class Kind { UnmappedAddress, BadEntry };
    SimError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

struct TimingEvent {
    std::string id;
    Cycles cycles = 0;
    bool operator==(const TimingEvent&) const = default;
};

// Timing-point id -> address.
using TimingPointTable = std::map<std::string, Address>;

// All `tp_*` symbols of the program.
TimingPointTable timing_points_from_symbols(const LoadedProgram& prog);

struct MachineState {
    Address pc = 0;
    Address next_pc = 0;
    bool in_delay_slot = false;
    std::array<Word, 32> regs{};
    Word hi = 0;
    Word lo = 0;
    // Bytes written since init, layered over the program image and the
    // zero-initialized stack.
    std::unordered_map<Address, uint8_t> memory;
    Cycles cycles = 0;
    uint64_t steps = 0;
    std::vector<TimingEvent> tp_events;
};

struct StepInfo {
    Address pc = 0;
    Mnemonic mnemonic{};
    bool taken = false;
    Cycles cost = 0;
};

struct TraceEntry {
    Address pc = 0;
    Mnemonic mnemonic{};
    bool taken = false;
    Cycles cycles_after = 0;
};

// `pc mnemonic cycles_after`
std::string format_trace_line(const TraceEntry& e);

enum class RunStatus { Finished, StepBudgetExceeded, Fault };

std::string_view run_status_name(RunStatus s);

struct FaultInfo {
    FaultKind kind{};
    Address pc = 0;
    std::string message;
};

struct RunResult {
    RunStatus status = RunStatus::Finished;
    std::optional<FaultInfo> fault;
    Cycles total_cycles = 0;
    uint64_t steps = 0;
    std::vector<TimingEvent> tp_events;
    Word return_value = 0; // $v0 at exit
};

using TraceSink = std::function<void(const TraceEntry&)>;

// Cycle-accurate interpreter over one program and timing model. The model is
// copied; the program must outlive the simulator. Executable sections are
// pre-decoded once; run() is const and may be called from several threads at
// the same time.
class Simulator {
  public:
    Simulator(const LoadedProgram& prog, const TimingModel& model, SimConfig config = {});

    const LoadedProgram& program() const { return prog_; }
    const TimingModel& model() const { return model_; }
    const SimConfig& config() const { return config_; }

    MachineState init_state(Address entry, const InputBinding& inputs) const;
    StepInfo step(MachineState& state) const;
    RunResult run(Address entry, const InputBinding& inputs, uint64_t step_budget,
                  const TimingPointTable& tp_table = {}, const TraceSink& trace = {}) const;

    const Instruction& fetch(Address pc) const;

    uint8_t load_byte(const MachineState& s, Address a, Address pc) const;
    void store_byte(MachineState& s, Address a, uint8_t v, Address pc) const;
    bool is_mapped(Address a) const { return prog_.is_mapped(a) || config_.in_stack(a); }

  private:
    struct DecodedSection {
        Address base;
        std::vector<Instruction> instrs;
    };

    Word load(const MachineState& s, Address a, unsigned width, Address pc) const;
    void store(MachineState& s, Address a, Word v, unsigned width, Address pc) const;

    const LoadedProgram& prog_;
    TimingModel model_;
    SimConfig config_;
    std::vector<DecodedSection> decoded_;
};

// Free-function forms of the simulator operations.
MachineState init_state(const LoadedProgram& prog, Address entry, const InputBinding& inputs,
                        const SimConfig& config = {});
void step(MachineState& state, const LoadedProgram& prog, const TimingModel& model);
RunResult run(const LoadedProgram& prog, const TimingModel& model, Address entry, const InputBinding& inputs,
              uint64_t step_budget, const TimingPointTable& tp_table = {});

} // namespace kta
