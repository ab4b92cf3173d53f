#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kta/isa.hpp"
#include "kta/loader.hpp"

namespace kta {

class CfgError : public std::runtime_error {
  public:
    enum class Kind {
        UnsupportedIndirectJump,
        BranchTargetOutsideFunction,
        UnknownInstructionOnPath,
        UnknownSymbol,
        BranchInDelaySlot,
        DelaySlotIsBranchTarget,
    };

    CfgError(Kind kind, Address pc, const std::string& what) : std::runtime_error(what), kind_(kind), pc_(pc) {}
    Kind kind() const { return kind_; }
    Address pc() const { return pc_; }

  private:
    Kind kind_;
    Address pc_;
};

struct PlacedInstruction {
    Address pc = 0;
    Instruction instr;
};

struct BasicBlock {
    Address start = 0;
    // The delay-slot instruction, when present, is the last element and
    // follows its control transfer.
    std::vector<PlacedInstruction> instrs;
    ControlClass terminator = ControlClass::Sequential;
    // CondBranch: {taken, fallthrough}. UncondJump: {target}. Call and
    // Sequential: {fallthrough}. Return: {}.
    std::vector<Address> succs;
    bool is_exit = false;
    std::optional<Address> callee;

    Address end() const { return start + 4 * static_cast<Address>(instrs.size()); }
    // Index of the control-transfer instruction, if the block has one.
    std::optional<size_t> transfer_index() const;
};

struct Cfg {
    std::string function;
    Address entry = 0;
    Address extent_begin = 0;
    Address extent_end = 0;
    std::map<Address, BasicBlock> blocks;

    const BasicBlock& block(Address start) const { return blocks.at(start); }
    // Direct callees in ascending address order.
    std::vector<Address> callees() const;
};

Cfg build_cfg(const LoadedProgram& prog, const std::string& func_symbol);

// End of a function's code: its symbol size, else the next function symbol,
// else the end of its section.
Address function_extent_end(const LoadedProgram& prog, const Symbol& sym);
// For callees reached through jal; the address must start a function symbol.
Cfg build_cfg_at(const LoadedProgram& prog, Address function_start);

std::string to_dot(const Cfg& cfg);

} // namespace kta
