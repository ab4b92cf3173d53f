#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "kta/isa.hpp"

namespace kta {

using Cycles = uint64_t;

class TimingError : public std::runtime_error {
  public:
    enum class Kind { UnknownKey, NonPositiveCost, SyntaxError, UnsupportedInstruction };

    TimingError(Kind kind, const std::string& what, size_t line = 0, size_t column = 0)
        : std::runtime_error(what), kind_(kind), line_(line), column_(column) {}
    Kind kind() const { return kind_; }
    size_t line() const { return line_; }
    size_t column() const { return column_; }

  private:
    Kind kind_;
    size_t line_;
    size_t column_;
};

// History-free per-instruction cost table. All WCET results are defined
// relative to one of these.
class TimingModel {
  public:
    TimingModel() { base_cost_.fill(1); }

    Cycles base_cost(Mnemonic m) const { return base_cost_[static_cast<size_t>(m)]; }
    Cycles branch_taken_extra() const { return branch_taken_extra_; }
    Cycles memory_access_extra() const { return memory_access_extra_; }
    Cycles muldiv_cost() const { return muldiv_cost_; }

    void set_base_cost(Mnemonic m, Cycles c);
    void set_branch_taken_extra(Cycles c) { branch_taken_extra_ = c; }
    void set_memory_access_extra(Cycles c) { memory_access_extra_ = c; }
    void set_muldiv_cost(Cycles c) { muldiv_cost_ = c; }

    // `taken` only matters for control transfers; jumps are always taken.
    Cycles cost(Mnemonic m, bool taken) const;
    Cycles cost(const Instruction& instr, bool taken) const;

    bool operator==(const TimingModel&) const = default;

  private:
    std::array<Cycles, kMnemonicCount> base_cost_{};
    Cycles branch_taken_extra_ = 0;
    Cycles memory_access_extra_ = 0;
    Cycles muldiv_cost_ = 0;
};

// Parses `key = integer` lines; `#` starts a comment.
TimingModel parse_timing_config(std::string_view text);

} // namespace kta
