#include "kta/isa.hpp"

#include <array>
#include <cstdio>

namespace kta {

namespace {

enum class Format : uint8_t { R, I, J };

// Which register/shamt fields an encoding actually uses. Unused fields must
// be zero for the word to belong to the supported table.
enum Field : uint8_t { kRs = 1, kRt = 2, kRd = 4, kShamt = 8 };

struct Encoding {
    Mnemonic mnemonic;
    Format format;
    uint8_t opcode;
    uint8_t code; // funct for SPECIAL, rt selector for REGIMM
    uint8_t fields;
    const char* name;
};

constexpr uint8_t kSpecial = 0x00;
constexpr uint8_t kRegimm = 0x01;

// clang-format off
constexpr std::array<Encoding, kMnemonicCount> kTable = {{
    {Mnemonic::Add,   Format::R, kSpecial, 0x20, kRs | kRt | kRd, "add"},
    {Mnemonic::Addu,  Format::R, kSpecial, 0x21, kRs | kRt | kRd, "addu"},
    {Mnemonic::Sub,   Format::R, kSpecial, 0x22, kRs | kRt | kRd, "sub"},
    {Mnemonic::Subu,  Format::R, kSpecial, 0x23, kRs | kRt | kRd, "subu"},
    {Mnemonic::Addi,  Format::I, 0x08, 0, kRs | kRt, "addi"},
    {Mnemonic::Addiu, Format::I, 0x09, 0, kRs | kRt, "addiu"},
    {Mnemonic::And,   Format::R, kSpecial, 0x24, kRs | kRt | kRd, "and"},
    {Mnemonic::Or,    Format::R, kSpecial, 0x25, kRs | kRt | kRd, "or"},
    {Mnemonic::Xor,   Format::R, kSpecial, 0x26, kRs | kRt | kRd, "xor"},
    {Mnemonic::Nor,   Format::R, kSpecial, 0x27, kRs | kRt | kRd, "nor"},
    {Mnemonic::Andi,  Format::I, 0x0c, 0, kRs | kRt, "andi"},
    {Mnemonic::Ori,   Format::I, 0x0d, 0, kRs | kRt, "ori"},
    {Mnemonic::Xori,  Format::I, 0x0e, 0, kRs | kRt, "xori"},
    {Mnemonic::Lui,   Format::I, 0x0f, 0, kRt, "lui"},
    {Mnemonic::Sll,   Format::R, kSpecial, 0x00, kRt | kRd | kShamt, "sll"},
    {Mnemonic::Srl,   Format::R, kSpecial, 0x02, kRt | kRd | kShamt, "srl"},
    {Mnemonic::Sra,   Format::R, kSpecial, 0x03, kRt | kRd | kShamt, "sra"},
    {Mnemonic::Sllv,  Format::R, kSpecial, 0x04, kRs | kRt | kRd, "sllv"},
    {Mnemonic::Srlv,  Format::R, kSpecial, 0x06, kRs | kRt | kRd, "srlv"},
    {Mnemonic::Srav,  Format::R, kSpecial, 0x07, kRs | kRt | kRd, "srav"},
    {Mnemonic::Slt,   Format::R, kSpecial, 0x2a, kRs | kRt | kRd, "slt"},
    {Mnemonic::Sltu,  Format::R, kSpecial, 0x2b, kRs | kRt | kRd, "sltu"},
    {Mnemonic::Slti,  Format::I, 0x0a, 0, kRs | kRt, "slti"},
    {Mnemonic::Sltiu, Format::I, 0x0b, 0, kRs | kRt, "sltiu"},
    {Mnemonic::Mult,  Format::R, kSpecial, 0x18, kRs | kRt, "mult"},
    {Mnemonic::Multu, Format::R, kSpecial, 0x19, kRs | kRt, "multu"},
    {Mnemonic::Div,   Format::R, kSpecial, 0x1a, kRs | kRt, "div"},
    {Mnemonic::Divu,  Format::R, kSpecial, 0x1b, kRs | kRt, "divu"},
    {Mnemonic::Mfhi,  Format::R, kSpecial, 0x10, kRd, "mfhi"},
    {Mnemonic::Mflo,  Format::R, kSpecial, 0x12, kRd, "mflo"},
    {Mnemonic::Lw,    Format::I, 0x23, 0, kRs | kRt, "lw"},
    {Mnemonic::Lh,    Format::I, 0x21, 0, kRs | kRt, "lh"},
    {Mnemonic::Lhu,   Format::I, 0x25, 0, kRs | kRt, "lhu"},
    {Mnemonic::Lb,    Format::I, 0x20, 0, kRs | kRt, "lb"},
    {Mnemonic::Lbu,   Format::I, 0x24, 0, kRs | kRt, "lbu"},
    {Mnemonic::Sw,    Format::I, 0x2b, 0, kRs | kRt, "sw"},
    {Mnemonic::Sh,    Format::I, 0x29, 0, kRs | kRt, "sh"},
    {Mnemonic::Sb,    Format::I, 0x28, 0, kRs | kRt, "sb"},
    {Mnemonic::Beq,   Format::I, 0x04, 0, kRs | kRt, "beq"},
    {Mnemonic::Bne,   Format::I, 0x05, 0, kRs | kRt, "bne"},
    {Mnemonic::Blez,  Format::I, 0x06, 0, kRs, "blez"},
    {Mnemonic::Bgtz,  Format::I, 0x07, 0, kRs, "bgtz"},
    {Mnemonic::Bltz,  Format::I, kRegimm, 0x00, kRs, "bltz"},
    {Mnemonic::Bgez,  Format::I, kRegimm, 0x01, kRs, "bgez"},
    {Mnemonic::J,     Format::J, 0x02, 0, 0, "j"},
    {Mnemonic::Jal,   Format::J, 0x03, 0, 0, "jal"},
    {Mnemonic::Jr,    Format::R, kSpecial, 0x08, kRs, "jr"},
    {Mnemonic::Jalr,  Format::R, kSpecial, 0x09, kRs | kRd, "jalr"},
}};
// clang-format on

constexpr const Encoding& entry(Mnemonic m) { return kTable[static_cast<size_t>(m)]; }

static_assert([] {
    for (size_t i = 0; i < kTable.size(); ++i) {
        if (static_cast<size_t>(kTable[i].mnemonic) != i) {
            return false;
        }
    }
    return true;
}());

// Reverse lookup tables built once from kTable.
struct DecodeTables {
    std::array<int8_t, 64> by_opcode{};
    std::array<int8_t, 64> by_funct{};
    std::array<int8_t, 32> by_regimm{};

    DecodeTables() {
        by_opcode.fill(-1);
        by_funct.fill(-1);
        by_regimm.fill(-1);
        for (const auto& e : kTable) {
            auto idx = static_cast<int8_t>(e.mnemonic);
            if (e.opcode == kSpecial) {
                by_funct[e.code] = idx;
            } else if (e.opcode == kRegimm) {
                by_regimm[e.code] = idx;
            } else {
                by_opcode[e.opcode] = idx;
            }
        }
    }
};

const DecodeTables& tables() {
    static const DecodeTables t;
    return t;
}

std::string reg(unsigned r) { return "$" + std::to_string(r); }

std::string hex(uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%x", v);
    return buf;
}

void check_reg(unsigned r, const char* field) {
    if (r > 31) {
        throw IsaError(IsaError::Kind::InvalidOperand, std::string("register field ") + field + " out of range");
    }
}

} // namespace

std::string_view mnemonic_name(Mnemonic m) { return entry(m).name; }

std::optional<Mnemonic> mnemonic_from_name(std::string_view name) {
    for (const auto& e : kTable) {
        if (name == e.name) {
            return e.mnemonic;
        }
    }
    return std::nullopt;
}

std::string_view control_class_name(ControlClass c) {
    switch (c) {
    case ControlClass::Sequential: return "sequential";
    case ControlClass::CondBranch: return "cond-branch";
    case ControlClass::UncondJump: return "jump";
    case ControlClass::Call: return "call";
    case ControlClass::IndirectJump: return "indirect-jump";
    case ControlClass::Return: return "return";
    case ControlClass::Unknown: return "unknown";
    }
    return "?";
}

Instruction decode(Word w) {
    const unsigned opcode = w >> 26;
    const unsigned rs = (w >> 21) & 31;
    const unsigned rt = (w >> 16) & 31;
    const unsigned rd = (w >> 11) & 31;
    const unsigned shamt = (w >> 6) & 31;
    const auto& t = tables();

    int idx = -1;
    if (opcode == kSpecial) {
        idx = t.by_funct[w & 63];
    } else if (opcode == kRegimm) {
        idx = t.by_regimm[rt];
    } else {
        idx = t.by_opcode[opcode];
    }
    if (idx < 0) {
        return Unknown{w};
    }
    const Encoding& e = kTable[static_cast<size_t>(idx)];
    switch (e.format) {
    case Format::R: {
        if ((!(e.fields & kRs) && rs) || (!(e.fields & kRt) && rt) || (!(e.fields & kRd) && rd) ||
            (!(e.fields & kShamt) && shamt)) {
            return Unknown{w};
        }
        return RType{e.mnemonic, static_cast<uint8_t>(rs), static_cast<uint8_t>(rt), static_cast<uint8_t>(rd),
                     static_cast<uint8_t>(shamt)};
    }
    case Format::I: {
        const bool rt_is_code = e.opcode == kRegimm;
        if (!(e.fields & kRs) && rs) {
            return Unknown{w};
        }
        if (!rt_is_code && !(e.fields & kRt) && rt) {
            return Unknown{w};
        }
        return IType{e.mnemonic, static_cast<uint8_t>(rs),
                     static_cast<uint8_t>((e.fields & kRt) ? rt : 0), static_cast<uint16_t>(w & 0xffff)};
    }
    case Format::J:
        return JType{e.mnemonic, w & 0x03ffffff};
    }
    return Unknown{w};
}

Word encode(const Instruction& instr) {
    return std::visit(
        [](const auto& in) -> Word {
            using T = std::decay_t<decltype(in)>;
            if constexpr (std::is_same_v<T, Unknown>) {
                throw IsaError(IsaError::Kind::CannotEncodeUnknown, "cannot encode unknown word " + hex(in.word));
            } else if constexpr (std::is_same_v<T, RType>) {
                const Encoding& e = entry(in.op);
                if (e.format != Format::R) {
                    throw IsaError(IsaError::Kind::InvalidOperand, std::string(e.name) + " is not R-type");
                }
                check_reg(in.rs, "rs");
                check_reg(in.rt, "rt");
                check_reg(in.rd, "rd");
                check_reg(in.shamt, "shamt");
                if ((!(e.fields & kRs) && in.rs) || (!(e.fields & kRt) && in.rt) || (!(e.fields & kRd) && in.rd) ||
                    (!(e.fields & kShamt) && in.shamt)) {
                    throw IsaError(IsaError::Kind::InvalidOperand,
                                   std::string(e.name) + " has a nonzero field it does not use");
                }
                return Word{in.rs} << 21 | Word{in.rt} << 16 | Word{in.rd} << 11 | Word{in.shamt} << 6 | e.code;
            } else if constexpr (std::is_same_v<T, IType>) {
                const Encoding& e = entry(in.op);
                if (e.format != Format::I) {
                    throw IsaError(IsaError::Kind::InvalidOperand, std::string(e.name) + " is not I-type");
                }
                check_reg(in.rs, "rs");
                check_reg(in.rt, "rt");
                if ((!(e.fields & kRs) && in.rs) || (!(e.fields & kRt) && in.rt)) {
                    throw IsaError(IsaError::Kind::InvalidOperand,
                                   std::string(e.name) + " has a nonzero field it does not use");
                }
                const Word rt = e.opcode == kRegimm ? e.code : in.rt;
                return Word{e.opcode} << 26 | Word{in.rs} << 21 | rt << 16 | in.imm;
            } else {
                const Encoding& e = entry(in.op);
                if (e.format != Format::J || in.target > 0x03ffffff) {
                    throw IsaError(IsaError::Kind::InvalidOperand, std::string(e.name) + " target out of range");
                }
                return Word{e.opcode} << 26 | in.target;
            }
        },
        instr);
}

std::optional<Mnemonic> mnemonic_of(const Instruction& instr) {
    return std::visit(
        [](const auto& in) -> std::optional<Mnemonic> {
            if constexpr (std::is_same_v<std::decay_t<decltype(in)>, Unknown>) {
                return std::nullopt;
            } else {
                return in.op;
            }
        },
        instr);
}

ControlClass classify(const Instruction& instr) {
    auto m = mnemonic_of(instr);
    if (!m) {
        return ControlClass::Unknown;
    }
    switch (*m) {
    case Mnemonic::Beq:
    case Mnemonic::Bne:
    case Mnemonic::Blez:
    case Mnemonic::Bgtz:
    case Mnemonic::Bltz:
    case Mnemonic::Bgez:
        return ControlClass::CondBranch;
    case Mnemonic::J:
        return ControlClass::UncondJump;
    case Mnemonic::Jal:
    case Mnemonic::Jalr:
        return ControlClass::Call;
    case Mnemonic::Jr:
        return std::get<RType>(instr).rs == 31 ? ControlClass::Return : ControlClass::IndirectJump;
    default:
        return ControlClass::Sequential;
    }
}

bool immediate_is_signed(Mnemonic m) {
    switch (m) {
    case Mnemonic::Andi:
    case Mnemonic::Ori:
    case Mnemonic::Xori:
    case Mnemonic::Lui:
        return false;
    default:
        return true;
    }
}

int64_t immediate_value(const IType& instr) {
    if (instr.op == Mnemonic::Lui) {
        return int64_t{instr.imm} << 16;
    }
    if (immediate_is_signed(instr.op)) {
        return static_cast<int16_t>(instr.imm);
    }
    return instr.imm;
}

bool is_load(Mnemonic m) {
    return m == Mnemonic::Lw || m == Mnemonic::Lh || m == Mnemonic::Lhu || m == Mnemonic::Lb || m == Mnemonic::Lbu;
}

bool is_store(Mnemonic m) { return m == Mnemonic::Sw || m == Mnemonic::Sh || m == Mnemonic::Sb; }

bool is_muldiv(Mnemonic m) {
    return m == Mnemonic::Mult || m == Mnemonic::Multu || m == Mnemonic::Div || m == Mnemonic::Divu;
}

bool is_cond_branch(Mnemonic m) {
    return m == Mnemonic::Beq || m == Mnemonic::Bne || m == Mnemonic::Blez || m == Mnemonic::Bgtz ||
           m == Mnemonic::Bltz || m == Mnemonic::Bgez;
}

bool is_jump(Mnemonic m) {
    return m == Mnemonic::J || m == Mnemonic::Jal || m == Mnemonic::Jr || m == Mnemonic::Jalr;
}

Address branch_target(const IType& instr, Address pc) {
    return pc + 4 + static_cast<Address>(static_cast<int32_t>(static_cast<int16_t>(instr.imm)) * 4);
}

Address jump_target(const JType& instr, Address pc) { return ((pc + 4) & 0xf0000000u) | (instr.target << 2); }

std::string disassemble(const Instruction& instr, Address pc) {
    if (const auto* u = std::get_if<Unknown>(&instr)) {
        char buf[24];
        std::snprintf(buf, sizeof buf, ".word 0x%08x", u->word);
        return buf;
    }
    if (const auto* j = std::get_if<JType>(&instr)) {
        return std::string(mnemonic_name(j->op)) + " " + hex(jump_target(*j, pc));
    }
    if (const auto* r = std::get_if<RType>(&instr)) {
        const std::string name(mnemonic_name(r->op));
        switch (r->op) {
        case Mnemonic::Sll:
            if (r->rd == 0 && r->rt == 0 && r->shamt == 0) {
                return "nop";
            }
            [[fallthrough]];
        case Mnemonic::Srl:
        case Mnemonic::Sra:
            return name + " " + reg(r->rd) + ", " + reg(r->rt) + ", " + std::to_string(r->shamt);
        case Mnemonic::Sllv:
        case Mnemonic::Srlv:
        case Mnemonic::Srav:
            return name + " " + reg(r->rd) + ", " + reg(r->rt) + ", " + reg(r->rs);
        case Mnemonic::Mult:
        case Mnemonic::Multu:
        case Mnemonic::Div:
        case Mnemonic::Divu:
            return name + " " + reg(r->rs) + ", " + reg(r->rt);
        case Mnemonic::Mfhi:
        case Mnemonic::Mflo:
            return name + " " + reg(r->rd);
        case Mnemonic::Jr:
            return name + " " + reg(r->rs);
        case Mnemonic::Jalr:
            return name + " " + reg(r->rd) + ", " + reg(r->rs);
        default:
            return name + " " + reg(r->rd) + ", " + reg(r->rs) + ", " + reg(r->rt);
        }
    }
    const auto& i = std::get<IType>(instr);
    const std::string name(mnemonic_name(i.op));
    if (is_cond_branch(i.op)) {
        const std::string target = hex(branch_target(i, pc));
        if (i.op == Mnemonic::Beq || i.op == Mnemonic::Bne) {
            return name + " " + reg(i.rs) + ", " + reg(i.rt) + ", " + target;
        }
        return name + " " + reg(i.rs) + ", " + target;
    }
    if (is_memory(i.op)) {
        return name + " " + reg(i.rt) + ", " + std::to_string(immediate_value(i)) + "(" + reg(i.rs) + ")";
    }
    if (i.op == Mnemonic::Lui) {
        return name + " " + reg(i.rt) + ", " + hex(i.imm);
    }
    if (!immediate_is_signed(i.op)) {
        return name + " " + reg(i.rt) + ", " + reg(i.rs) + ", " + hex(i.imm);
    }
    return name + " " + reg(i.rt) + ", " + reg(i.rs) + ", " + std::to_string(immediate_value(i));
}

namespace asm_ {

namespace {
uint8_t r5(unsigned v) {
    check_reg(v, "operand");
    return static_cast<uint8_t>(v);
}
} // namespace

Instruction r(Mnemonic op, unsigned rd, unsigned rs, unsigned rt) {
    return RType{op, r5(rs), r5(rt), r5(rd), 0};
}
Instruction shift(Mnemonic op, unsigned rd, unsigned rt, unsigned shamt) {
    return RType{op, 0, r5(rt), r5(rd), r5(shamt)};
}
Instruction i(Mnemonic op, unsigned rt, unsigned rs, int32_t imm) {
    return IType{op, r5(rs), r5(rt), static_cast<uint16_t>(imm)};
}
Instruction mem(Mnemonic op, unsigned rt, int32_t offset, unsigned base) {
    return IType{op, r5(base), r5(rt), static_cast<uint16_t>(offset)};
}
Instruction branch(Mnemonic op, unsigned rs, unsigned rt, int32_t word_offset) {
    const bool two_regs = op == Mnemonic::Beq || op == Mnemonic::Bne;
    return IType{op, r5(rs), two_regs ? r5(rt) : uint8_t{0}, static_cast<uint16_t>(word_offset)};
}
Instruction jump(Mnemonic op, Address target) { return JType{op, (target >> 2) & 0x03ffffff}; }
Instruction jr(unsigned rs) { return RType{Mnemonic::Jr, r5(rs), 0, 0, 0}; }
Instruction jalr(unsigned rd, unsigned rs) { return RType{Mnemonic::Jalr, r5(rs), 0, r5(rd), 0}; }
Instruction nop() { return RType{Mnemonic::Sll, 0, 0, 0, 0}; }

} // namespace asm_

} // namespace kta
