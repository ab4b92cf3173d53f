#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "kta/loader.hpp"

namespace kta {

// The supported MIPS32 subset. Anything else decodes to Unknown.
enum class Mnemonic : uint8_t {
    Add, Addu, Sub, Subu, Addi, Addiu,
    And, Or, Xor, Nor, Andi, Ori, Xori, Lui,
    Sll, Srl, Sra, Sllv, Srlv, Srav,
    Slt, Sltu, Slti, Sltiu,
    Mult, Multu, Div, Divu, Mfhi, Mflo,
    Lw, Lh, Lhu, Lb, Lbu, Sw, Sh, Sb,
    Beq, Bne, Blez, Bgtz, Bltz, Bgez,
    J, Jal, Jr, Jalr,
};

inline constexpr size_t kMnemonicCount = static_cast<size_t>(Mnemonic::Jalr) + 1;

std::string_view mnemonic_name(Mnemonic m);
std::optional<Mnemonic> mnemonic_from_name(std::string_view name);

struct RType {
    Mnemonic op;
    uint8_t rs = 0, rt = 0, rd = 0, shamt = 0;
    bool operator==(const RType&) const = default;
};

struct IType {
    Mnemonic op;
    uint8_t rs = 0, rt = 0;
    uint16_t imm = 0; // raw pattern; see immediate_value()
    bool operator==(const IType&) const = default;
};

struct JType {
    Mnemonic op;
    uint32_t target = 0; // 26-bit word index
    bool operator==(const JType&) const = default;
};

struct Unknown {
    Word word = 0;
    bool operator==(const Unknown&) const = default;
};

using Instruction = std::variant<RType, IType, JType, Unknown>;

enum class ControlClass { Sequential, CondBranch, UncondJump, Call, IndirectJump, Return, Unknown };

std::string_view control_class_name(ControlClass c);

class IsaError : public std::runtime_error {
  public:
    enum class Kind { CannotEncodeUnknown, InvalidOperand };
    IsaError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

Instruction decode(Word word);
Word encode(const Instruction& instr);

std::optional<Mnemonic> mnemonic_of(const Instruction& instr);
inline bool is_supported(const Instruction& instr) { return !std::holds_alternative<Unknown>(instr); }

ControlClass classify(const Instruction& instr);

// Sign- or zero-extended immediate according to the mnemonic. lui returns
// the shifted value.
int64_t immediate_value(const IType& instr);
bool immediate_is_signed(Mnemonic m);

bool is_load(Mnemonic m);
bool is_store(Mnemonic m);
inline bool is_memory(Mnemonic m) { return is_load(m) || is_store(m); }
bool is_muldiv(Mnemonic m);
bool is_cond_branch(Mnemonic m);
bool is_jump(Mnemonic m);

// Target of a conditional branch located at pc.
Address branch_target(const IType& instr, Address pc);
// Target of j/jal located at pc.
Address jump_target(const JType& instr, Address pc);

std::string disassemble(const Instruction& instr, Address pc);

// Convenience constructors used by fixtures and tests.
namespace asm_ {
Instruction r(Mnemonic op, unsigned rd, unsigned rs, unsigned rt);
Instruction shift(Mnemonic op, unsigned rd, unsigned rt, unsigned shamt);
Instruction i(Mnemonic op, unsigned rt, unsigned rs, int32_t imm);
Instruction mem(Mnemonic op, unsigned rt, int32_t offset, unsigned base);
Instruction branch(Mnemonic op, unsigned rs, unsigned rt, int32_t word_offset);
Instruction jump(Mnemonic op, Address target);
Instruction jr(unsigned rs);
Instruction jalr(unsigned rd, unsigned rs);
Instruction nop();
} // namespace asm_

} // namespace kta
