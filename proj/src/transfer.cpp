#include "transfer.hpp"

#include <algorithm>
#include <utility>

#include "util.hpp"

namespace kta::detail {

namespace {

// Interval addresses spanning more words than this are not enumerated.
constexpr int64_t kMaxSpanWords = 64;

void note_may_fault(AbstractState& s, ExecContext& ctx) {
    ctx.may_fault = true;
    s.exact = false;
}

bool references(const Origin& o, unsigned r) {
    switch (o.kind) {
    case Origin::Kind::Compare: return (o.a.is_reg && o.a.reg == r) || (o.b.is_reg && o.b.reg == r);
    case Origin::Kind::Offset: return o.base == r;
    default: return false;
    }
}

void forget_mem(AbstractState& s, Address a) {
    for (auto& o : s.origins) {
        if (o.kind == Origin::Kind::Mem && o.addr == a) {
            o = {};
        }
    }
}

void forget_all_mem(AbstractState& s) {
    for (auto& o : s.origins) {
        if (o.kind == Origin::Kind::Mem) {
            o = {};
        }
    }
}

// Writes a result, clearing exact when Top appears from non-Top operands.
void set_result(AbstractState& s, unsigned rd, const Interval& v, const Interval& a, const Interval& b) {
    if (v.is_top() && !a.is_top() && !b.is_top()) {
        s.exact = false;
    }
    write_reg(s, rd, v);
}

OriginOperand reg_operand(unsigned r) {
    if (r == 0) {
        return OriginOperand{false, 0, 0};
    }
    return OriginOperand{true, static_cast<uint8_t>(r), 0};
}

Interval operand_value(const AbstractState& s, const OriginOperand& op, View v) {
    if (op.is_reg) {
        return reg_value(s, op.reg);
    }
    return Interval::constant(op.value, v);
}

Origin mem_origin(Address addr) {
    Origin o;
    o.kind = Origin::Kind::Mem;
    o.addr = addr;
    return o;
}

void set_offset_origin(AbstractState& s, unsigned rd, unsigned base, int64_t delta) {
    if (rd != 0 && base != 0 && rd != base) {
        Origin o;
        o.kind = Origin::Kind::Offset;
        o.base = static_cast<uint8_t>(base);
        o.delta = delta;
        s.origins[rd] = o;
    }
}

Interval add_wrapping(const Interval& a, const Interval& b) {
    if (a.is_singleton() && b.is_singleton()) {
        return Interval::constant(*a.singleton() + *b.singleton());
    }
    Interval r = iv_add(a.in_view(View::Signed), b);
    if (!r.is_top()) {
        return r;
    }
    return iv_add(a.in_view(View::Unsigned), b);
}

Interval sub_wrapping(const Interval& a, const Interval& b) {
    if (a.is_singleton() && b.is_singleton()) {
        return Interval::constant(*a.singleton() - *b.singleton());
    }
    Interval r = iv_sub(a.in_view(View::Signed), b);
    if (!r.is_top()) {
        return r;
    }
    return iv_sub(a.in_view(View::Unsigned), b);
}

// add/sub/addi: results that overflow trap instead of wrapping.
bool trapping(AbstractState& s, ExecContext& ctx, unsigned rd, const Interval& a, const Interval& b, bool subtract) {
    const auto [alo, ahi] = a.bounds(View::Signed).value_or(std::pair{kSignedMin, kSignedMax});
    const auto [blo, bhi] = b.bounds(View::Signed).value_or(std::pair{kSignedMin, kSignedMax});
    const int64_t lo = subtract ? alo - bhi : alo + blo;
    const int64_t hi = subtract ? ahi - blo : ahi + bhi;
    if (hi < kSignedMin || lo > kSignedMax) {
        note_may_fault(s, ctx);
        return false;
    }
    if (lo < kSignedMin || hi > kSignedMax) {
        note_may_fault(s, ctx);
    }
    write_reg(s, rd, Interval::range(lo, hi, View::Signed));
    return true;
}

bool bytes_mapped(const ExecContext& ctx, Address a, unsigned n) {
    for (unsigned i = 0; i < n; ++i) {
        if (!ctx.prog->is_mapped(a + i) && !ctx.config.in_stack(a + i)) {
            return false;
        }
    }
    return true;
}

struct EffectiveAddress {
    bool singleton = false;
    Address addr = 0;
    bool bounded = false;
    int64_t lo = 0;
    int64_t hi = 0;
};

EffectiveAddress effective_address(const AbstractState& s, const Operands& o) {
    const Interval base = reg_value(s, o.rs);
    if (auto w = base.singleton()) {
        return {true, *w + o.imm};
    }
    const auto ub = base.bounds(View::Unsigned);
    if (!ub) {
        return {};
    }
    const int64_t off = static_cast<int32_t>(o.imm);
    const int64_t lo = ub->first + off;
    const int64_t hi = ub->second + off;
    if (lo < 0 || hi > kUnsignedMax) {
        return {};
    }
    return {false, 0, true, lo, hi};
}

bool span_enumerable(const EffectiveAddress& ea) { return ea.bounded && ea.hi - ea.lo <= 4 * kMaxSpanWords; }

int64_t align_up(int64_t x, unsigned width) { return (x + width - 1) / width * width; }

Word field_mask(unsigned width) { return width == 1 ? 0xffu : 0xffffu; }
unsigned field_shift(unsigned offset, unsigned width) { return (4 - offset - width) * 8; }

Interval full_field(unsigned width, bool sign) {
    if (width == 4) {
        return Interval::top();
    }
    const int64_t span = int64_t{field_mask(width)} + 1;
    return sign ? Interval::range(-span / 2, span / 2 - 1) : Interval::range(0, span - 1, View::Unsigned);
}

// The byte or halfword at `offset` of a big-endian word, extended.
Interval extract(const Interval& word, unsigned offset, unsigned width, bool sign) {
    if (width == 4) {
        return word;
    }
    const unsigned shift = field_shift(offset, width);
    const Word mask = field_mask(width);
    if (auto w = word.singleton()) {
        Word f = (*w >> shift) & mask;
        if (sign) {
            f = width == 1 ? static_cast<Word>(static_cast<int8_t>(f)) : static_cast<Word>(static_cast<int16_t>(f));
        }
        return Interval::constant(f);
    }
    const Interval field = iv_and(iv_shift(ShiftKind::Srl, word, Interval::constant(shift)),
                                  Interval::constant(mask, View::Unsigned));
    const auto [flo, fhi] = field.bounds(View::Unsigned).value_or(std::pair{int64_t{0}, int64_t{mask}});
    if (!sign) {
        return Interval::range(flo, fhi, View::Unsigned);
    }
    const int64_t span = int64_t{mask} + 1;
    if (fhi < span / 2) {
        return Interval::range(flo, fhi);
    }
    if (flo >= span / 2) {
        return Interval::range(flo - span, fhi - span);
    }
    return Interval::range(-span / 2, span / 2 - 1);
}

// `old` with the field at `offset` replaced by the low bits of `value`.
Interval compose(const Interval& old, const Interval& value, unsigned offset, unsigned width) {
    if (width == 4) {
        return value;
    }
    const unsigned shift = field_shift(offset, width);
    const Word mask = field_mask(width);
    const Interval field = iv_and(value, Interval::constant(mask, View::Unsigned));
    const auto w = old.singleton();
    const auto fb = field.bounds(View::Unsigned);
    if (!w || !fb) {
        return Interval::top();
    }
    const int64_t cleared = *w & ~(mask << shift);
    return Interval::range(cleared + (fb->first << shift), cleared + (fb->second << shift), View::Unsigned);
}

template <unsigned Width, bool Sign>
bool load_op(AbstractState& s, ExecContext& ctx, const Operands& o) {
    const EffectiveAddress ea = effective_address(s, o);
    if (ea.singleton) {
        if (ea.addr % Width != 0 || !bytes_mapped(ctx, ea.addr, Width)) {
            note_may_fault(s, ctx);
            return false;
        }
        const Address wa = ea.addr & ~Address{3};
        write_reg(s, o.rt, extract(*mem_word(s, ctx, wa), ea.addr & 3, Width, Sign));
        if (Width == 4 && o.rt != 0) {
            s.origins[o.rt] = mem_origin(wa);
        }
        return true;
    }
    if (!span_enumerable(ea)) {
        write_reg(s, o.rt, full_field(Width, Sign));
        note_may_fault(s, ctx);
        return true;
    }
    // A non-singleton range always holds a misaligned address for wide
    // accesses.
    bool faults = Width > 1;
    Interval acc;
    for (int64_t x = align_up(ea.lo, Width); x <= ea.hi; x += Width) {
        const auto a = static_cast<Address>(x);
        if (!bytes_mapped(ctx, a, Width)) {
            faults = true;
            continue;
        }
        acc = iv_join(acc, extract(*mem_word(s, ctx, a & ~Address{3}), a & 3, Width, Sign));
    }
    if (acc.is_bottom()) {
        note_may_fault(s, ctx);
        return false;
    }
    s.exact = false;
    if (faults) {
        note_may_fault(s, ctx);
    }
    write_reg(s, o.rt, acc);
    return true;
}

template <unsigned Width>
bool store_op(AbstractState& s, ExecContext& ctx, const Operands& o) {
    const Interval v = reg_value(s, o.rt);
    const EffectiveAddress ea = effective_address(s, o);
    if (ea.singleton) {
        if (ea.addr % Width != 0 || !bytes_mapped(ctx, ea.addr, Width)) {
            note_may_fault(s, ctx);
            return false;
        }
        const Address wa = ea.addr & ~Address{3};
        const Interval old = *mem_word(s, ctx, wa);
        const Interval nw = compose(old, v, ea.addr & 3, Width);
        if (nw.is_top() && !old.is_top() && !v.is_top()) {
            s.exact = false;
        }
        forget_mem(s, wa);
        s.mem.overlay[wa] = nw;
        if (Width == 4 && o.rt != 0 && s.origins[o.rt].kind == Origin::Kind::None) {
            s.origins[o.rt] = mem_origin(wa);
        }
        return true;
    }
    if (!span_enumerable(ea)) {
        if (ctx.write == WritePolicy::Fail) {
            throw AbsError(AbsError::Kind::UnresolvableMemoryWrite, o.pc,
                           "store at " + hex32(o.pc) + " has an unbounded address range");
        }
        s.mem.overlay.clear();
        s.mem.smashed = true;
        forget_all_mem(s);
        note_may_fault(s, ctx);
        return true;
    }
    bool faults = Width > 1;
    bool any = false;
    for (int64_t x = align_up(ea.lo, Width); x <= ea.hi; x += Width) {
        const auto a = static_cast<Address>(x);
        if (!bytes_mapped(ctx, a, Width)) {
            faults = true;
            continue;
        }
        any = true;
        const Address wa = a & ~Address{3};
        const Interval old = *mem_word(s, ctx, wa);
        forget_mem(s, wa);
        s.mem.overlay[wa] = iv_join(old, compose(old, v, a & 3, Width));
    }
    if (!any) {
        note_may_fault(s, ctx);
        return false;
    }
    s.exact = false;
    if (faults) {
        note_may_fault(s, ctx);
    }
    return true;
}

template <bool Signed>
bool mult_op(AbstractState& s, ExecContext&, const Operands& o) {
    const Interval a = reg_value(s, o.rs);
    const Interval b = reg_value(s, o.rt);
    const ProductIntervals p = iv_mult(a, b, Signed ? View::Signed : View::Unsigned);
    if ((p.lo.is_top() || p.hi.is_top()) && !a.is_top() && !b.is_top()) {
        s.exact = false;
    }
    s.lo = p.lo;
    s.hi = p.hi;
    return true;
}

template <bool Signed>
bool div_op(AbstractState& s, ExecContext& ctx, const Operands& o) {
    const Interval a = reg_value(s, o.rs);
    const Interval b = reg_value(s, o.rt);
    if (a.is_singleton() && b.is_singleton()) {
        const Word x = *a.singleton();
        const Word y = *b.singleton();
        if (y == 0) {
            note_may_fault(s, ctx);
            return false;
        }
        if (Signed) {
            const auto sx = static_cast<int32_t>(x);
            const auto sy = static_cast<int32_t>(y);
            if (sx == std::numeric_limits<int32_t>::min() && sy == -1) {
                s.lo = Interval::constant(x);
                s.hi = Interval::constant(0);
            } else {
                s.lo = Interval::constant(static_cast<Word>(sx / sy));
                s.hi = Interval::constant(static_cast<Word>(sx % sy));
            }
        } else {
            s.lo = Interval::constant(x / y, View::Unsigned);
            s.hi = Interval::constant(x % y, View::Unsigned);
        }
        return true;
    }
    if (b.contains(0)) {
        note_may_fault(s, ctx);
    }
    const QuotientIntervals q = iv_div(a, b, Signed ? View::Signed : View::Unsigned);
    if (q.quotient.is_bottom()) {
        return false;
    }
    if ((q.quotient.is_top() || q.remainder.is_top()) && !a.is_top() && !b.is_top()) {
        s.exact = false;
    }
    s.lo = q.quotient;
    s.hi = q.remainder;
    return true;
}

template <bool Unsigned, bool Immediate>
bool compare_op(AbstractState& s, ExecContext&, const Operands& o) {
    const unsigned rd = Immediate ? o.rt : o.rd;
    const Interval a = reg_value(s, o.rs);
    const Interval b = Immediate ? Interval::constant(o.imm) : reg_value(s, o.rt);
    write_reg(s, rd, Unsigned ? iv_sltu(a, b) : iv_slt(a, b));
    if (rd != 0 && rd != o.rs && (Immediate || rd != o.rt)) {
        Origin c;
        c.kind = Origin::Kind::Compare;
        c.cond = Unsigned ? BranchCond::Ltu : BranchCond::Lt;
        c.a = reg_operand(o.rs);
        c.b = Immediate ? OriginOperand{false, 0, o.imm} : reg_operand(o.rt);
        s.origins[rd] = c;
    }
    return true;
}

template <ShiftKind K, bool Variable>
bool shift_op(AbstractState& s, ExecContext&, const Operands& o) {
    const Interval value = reg_value(s, o.rt);
    const Interval amount = Variable ? reg_value(s, o.rs) : Interval::constant(o.shamt);
    set_result(s, o.rd, iv_shift(K, value, amount), value, amount);
    return true;
}

template <Mnemonic M>
bool op(AbstractState& s, ExecContext& ctx, const Operands& o) {
    using enum Mnemonic;
    if constexpr (M == Add || M == Sub) {
        return trapping(s, ctx, o.rd, reg_value(s, o.rs), reg_value(s, o.rt), M == Sub);
    } else if constexpr (M == Addi) {
        return trapping(s, ctx, o.rt, reg_value(s, o.rs), Interval::constant(o.imm), false);
    } else if constexpr (M == Addu || M == Subu) {
        const Interval a = reg_value(s, o.rs);
        const Interval b = reg_value(s, o.rt);
        set_result(s, o.rd, M == Addu ? add_wrapping(a, b) : sub_wrapping(a, b), a, b);
        if (o.rt == 0) {
            set_offset_origin(s, o.rd, o.rs, 0);
        } else if (M == Addu && o.rs == 0) {
            set_offset_origin(s, o.rd, o.rt, 0);
        }
        return true;
    } else if constexpr (M == Addiu) {
        const Interval a = reg_value(s, o.rs);
        const Interval b = Interval::constant(o.imm);
        set_result(s, o.rt, add_wrapping(a, b), a, b);
        set_offset_origin(s, o.rt, o.rs, static_cast<int32_t>(o.imm));
        return true;
    } else if constexpr (M == And || M == Or || M == Xor || M == Nor) {
        const Interval a = reg_value(s, o.rs);
        const Interval b = reg_value(s, o.rt);
        Interval v;
        if constexpr (M == And) {
            v = iv_and(a, b);
        } else if constexpr (M == Or) {
            v = iv_or(a, b);
        } else if constexpr (M == Xor) {
            v = iv_xor(a, b);
        } else {
            v = iv_nor(a, b);
        }
        set_result(s, o.rd, v, a, b);
        if (M == Or && o.rt == 0) {
            set_offset_origin(s, o.rd, o.rs, 0);
        } else if (M == Or && o.rs == 0) {
            set_offset_origin(s, o.rd, o.rt, 0);
        }
        return true;
    } else if constexpr (M == Andi || M == Ori || M == Xori) {
        const Interval a = reg_value(s, o.rs);
        const Interval b = Interval::constant(o.imm, View::Unsigned);
        const Interval v = M == Andi ? iv_and(a, b) : M == Ori ? iv_or(a, b) : iv_xor(a, b);
        set_result(s, o.rt, v, a, b);
        return true;
    } else if constexpr (M == Lui) {
        write_reg(s, o.rt, Interval::constant(o.imm));
        return true;
    } else if constexpr (M == Sll) {
        return shift_op<ShiftKind::Sll, false>(s, ctx, o);
    } else if constexpr (M == Srl) {
        return shift_op<ShiftKind::Srl, false>(s, ctx, o);
    } else if constexpr (M == Sra) {
        return shift_op<ShiftKind::Sra, false>(s, ctx, o);
    } else if constexpr (M == Sllv) {
        return shift_op<ShiftKind::Sll, true>(s, ctx, o);
    } else if constexpr (M == Srlv) {
        return shift_op<ShiftKind::Srl, true>(s, ctx, o);
    } else if constexpr (M == Srav) {
        return shift_op<ShiftKind::Sra, true>(s, ctx, o);
    } else if constexpr (M == Slt) {
        return compare_op<false, false>(s, ctx, o);
    } else if constexpr (M == Sltu) {
        return compare_op<true, false>(s, ctx, o);
    } else if constexpr (M == Slti) {
        return compare_op<false, true>(s, ctx, o);
    } else if constexpr (M == Sltiu) {
        return compare_op<true, true>(s, ctx, o);
    } else if constexpr (M == Mult || M == Multu) {
        return mult_op<M == Mult>(s, ctx, o);
    } else if constexpr (M == Div || M == Divu) {
        return div_op<M == Div>(s, ctx, o);
    } else if constexpr (M == Mfhi) {
        write_reg(s, o.rd, s.hi);
        return true;
    } else if constexpr (M == Mflo) {
        write_reg(s, o.rd, s.lo);
        return true;
    } else if constexpr (M == Lw) {
        return load_op<4, false>(s, ctx, o);
    } else if constexpr (M == Lh) {
        return load_op<2, true>(s, ctx, o);
    } else if constexpr (M == Lhu) {
        return load_op<2, false>(s, ctx, o);
    } else if constexpr (M == Lb) {
        return load_op<1, true>(s, ctx, o);
    } else if constexpr (M == Lbu) {
        return load_op<1, false>(s, ctx, o);
    } else if constexpr (M == Sw) {
        return store_op<4>(s, ctx, o);
    } else if constexpr (M == Sh) {
        return store_op<2>(s, ctx, o);
    } else if constexpr (M == Sb) {
        return store_op<1>(s, ctx, o);
    } else {
        // Control transfers are handled by the block terminator.
        return true;
    }
}

template <size_t... I>
constexpr std::array<OpImpl, kMnemonicCount> make_table(std::index_sequence<I...>) {
    return {&op<static_cast<Mnemonic>(I)>...};
}

constexpr auto kOpTable = make_table(std::make_index_sequence<kMnemonicCount>{});

// Narrows r to v and carries the narrowing one step through its origin.
bool refine_reg(AbstractState& s, const ExecContext& ctx, unsigned r, const Interval& v, int depth = 0) {
    if (r == 0) {
        return v.contains(0);
    }
    const Interval m = iv_meet(s.regs[r], v);
    if (m.is_bottom()) {
        return false;
    }
    if (m == s.regs[r]) {
        return true;
    }
    s.regs[r] = m;
    if (depth >= 2) {
        return true;
    }
    const Origin o = s.origins[r];
    if (o.kind == Origin::Kind::Mem) {
        if (auto w = mem_word(s, ctx, o.addr)) {
            const Interval nw = iv_meet(*w, m);
            if (nw.is_bottom()) {
                return false;
            }
            s.mem.overlay[o.addr] = nw;
        }
    } else if (o.kind == Origin::Kind::Offset) {
        const Interval base = sub_wrapping(m, Interval::constant(static_cast<Word>(o.delta)));
        if (!base.is_top() && !refine_reg(s, ctx, o.base, base, depth + 1)) {
            return false;
        }
    }
    for (unsigned j = 1; j < 32; ++j) {
        const Origin& oj = s.origins[j];
        if (j != r && oj.kind == Origin::Kind::Offset && oj.base == r) {
            const Interval derived = add_wrapping(m, Interval::constant(static_cast<Word>(oj.delta)));
            if (!derived.is_top() && !refine_reg(s, ctx, j, derived, depth + 1)) {
                return false;
            }
        }
    }
    return true;
}

std::optional<AbstractState> refined(const AbstractState& s, const ExecContext& ctx,
                                     const std::optional<OperandPair>& pair, const OriginOperand& a,
                                     const OriginOperand& b) {
    if (!pair) {
        return std::nullopt;
    }
    AbstractState out = s;
    if (a.is_reg && !refine_reg(out, ctx, a.reg, pair->first)) {
        return std::nullopt;
    }
    if (b.is_reg && !refine_reg(out, ctx, b.reg, pair->second)) {
        return std::nullopt;
    }
    return out;
}

BranchCond zero_compare(Mnemonic m) {
    switch (m) {
    case Mnemonic::Blez: return BranchCond::Lez;
    case Mnemonic::Bgtz: return BranchCond::Gtz;
    case Mnemonic::Bltz: return BranchCond::Ltz;
    default: return BranchCond::Gez;
    }
}

} // namespace

Interval reg_value(const AbstractState& s, unsigned r) { return r == 0 ? Interval::constant(0) : s.regs[r]; }

void write_reg(AbstractState& s, unsigned r, const Interval& v) {
    if (r == 0) {
        return;
    }
    s.origins[r] = {};
    for (auto& o : s.origins) {
        if (references(o, r)) {
            o = {};
        }
    }
    s.regs[r] = v;
}

std::optional<Interval> mem_word(const AbstractState& s, const ExecContext& ctx, Address a) {
    if (auto it = s.mem.overlay.find(a); it != s.mem.overlay.end()) {
        return it->second;
    }
    Word w = 0;
    bool any = false;
    for (unsigned i = 0; i < 4; ++i) {
        uint8_t byte = 0;
        if (const Section* sec = ctx.prog->section_at(a + i)) {
            byte = sec->bytes[a + i - sec->vaddr];
            any = true;
        } else if (ctx.config.in_stack(a + i)) {
            any = true;
        }
        w = w << 8 | byte;
    }
    if (!any) {
        return std::nullopt;
    }
    if (s.mem.smashed) {
        return Interval::top();
    }
    return Interval::constant(w);
}

Operands operands_of(const Instruction& in, Address pc) {
    Operands o;
    o.pc = pc;
    if (const auto* r = std::get_if<RType>(&in)) {
        o.rd = r->rd;
        o.rs = r->rs;
        o.rt = r->rt;
        o.shamt = r->shamt;
    } else if (const auto* i = std::get_if<IType>(&in)) {
        o.rs = i->rs;
        o.rt = i->rt;
        o.imm = static_cast<Word>(immediate_value(*i));
    } else if (const auto* j = std::get_if<JType>(&in)) {
        o.imm = jump_target(*j, pc);
    }
    return o;
}

OpImpl op_impl(Mnemonic m) { return kOpTable[static_cast<size_t>(m)]; }

bool exec_op(const Instruction& in, Address pc, AbstractState& s, ExecContext& ctx) {
    const auto m = mnemonic_of(in);
    if (!m) {
        throw AbsError(AbsError::Kind::UnsupportedInstruction, pc,
                       "unsupported instruction " + disassemble(in, pc) + " at " + hex32(pc));
    }
    const Operands o = operands_of(in, pc);
    switch (*m) {
#define KTA_OP_CASE(name) \
    case Mnemonic::name: return op<Mnemonic::name>(s, ctx, o);
        KTA_OP_CASE(Add) KTA_OP_CASE(Addu) KTA_OP_CASE(Sub) KTA_OP_CASE(Subu) KTA_OP_CASE(Addi)
        KTA_OP_CASE(Addiu) KTA_OP_CASE(And) KTA_OP_CASE(Or) KTA_OP_CASE(Xor) KTA_OP_CASE(Nor)
        KTA_OP_CASE(Andi) KTA_OP_CASE(Ori) KTA_OP_CASE(Xori) KTA_OP_CASE(Lui) KTA_OP_CASE(Sll)
        KTA_OP_CASE(Srl) KTA_OP_CASE(Sra) KTA_OP_CASE(Sllv) KTA_OP_CASE(Srlv) KTA_OP_CASE(Srav)
        KTA_OP_CASE(Slt) KTA_OP_CASE(Sltu) KTA_OP_CASE(Slti) KTA_OP_CASE(Sltiu) KTA_OP_CASE(Mult)
        KTA_OP_CASE(Multu) KTA_OP_CASE(Div) KTA_OP_CASE(Divu) KTA_OP_CASE(Mfhi) KTA_OP_CASE(Mflo)
        KTA_OP_CASE(Lw) KTA_OP_CASE(Lh) KTA_OP_CASE(Lhu) KTA_OP_CASE(Lb) KTA_OP_CASE(Lbu)
        KTA_OP_CASE(Sw) KTA_OP_CASE(Sh) KTA_OP_CASE(Sb)
#undef KTA_OP_CASE
    default:
        return true;
    }
}

BranchSplit split_branch(const BranchSpec& b, const AbstractState& s, ExecContext& ctx) {
    const bool eq_family = b.op == Mnemonic::Beq || b.op == Mnemonic::Bne;
    if (eq_family && (b.rs == 0) != (b.rt == 0)) {
        // beq/bne of a set-on-less-than result against zero: refine the
        // operands of the comparison that produced it.
        const unsigned t = b.rs == 0 ? b.rt : b.rs;
        const Origin& o = s.origins[t];
        if (o.kind == Origin::Kind::Compare && !s.regs[t].is_singleton() &&
            s.regs[t].subset_of(Interval::range(0, 1))) {
            const View v = o.cond == BranchCond::Ltu ? View::Unsigned : View::Signed;
            const BranchRefinement r = refine_branch(o.cond, operand_value(s, o.a, v), operand_value(s, o.b, v));
            auto holds = refined(s, ctx, r.taken, o.a, o.b);
            auto fails = refined(s, ctx, r.not_taken, o.a, o.b);
            if (holds && !refine_reg(*holds, ctx, t, Interval::constant(1))) {
                holds.reset();
            }
            if (fails && !refine_reg(*fails, ctx, t, Interval::constant(0))) {
                fails.reset();
            }
            if (b.op == Mnemonic::Bne) {
                return {std::move(holds), std::move(fails)};
            }
            return {std::move(fails), std::move(holds)};
        }
    }
    if (eq_family) {
        const BranchRefinement r = refine_branch(b.op == Mnemonic::Beq ? BranchCond::Eq : BranchCond::Ne,
                                                 reg_value(s, b.rs), reg_value(s, b.rt));
        return {refined(s, ctx, r.taken, reg_operand(b.rs), reg_operand(b.rt)),
                refined(s, ctx, r.not_taken, reg_operand(b.rs), reg_operand(b.rt))};
    }
    const BranchRefinement r = refine_branch(zero_compare(b.op), reg_value(s, b.rs), Interval::constant(0));
    return {refined(s, ctx, r.taken, reg_operand(b.rs), {}), refined(s, ctx, r.not_taken, reg_operand(b.rs), {})};
}

AbstractState join_states(const AbstractState& a, const AbstractState& b, const ExecContext& ctx) {
    AbstractState out = a;
    out.path_hash = a.path_hash ^ b.path_hash;
    for (size_t r = 0; r < 32; ++r) {
        if (a.origins[r] != b.origins[r]) {
            out.origins[r] = {};
        }
    }
    const bool same = a.regs == b.regs && a.hi == b.hi && a.lo == b.lo && a.mem == b.mem && a.time == b.time;
    out.exact = a.exact && b.exact && same;
    if (same) {
        return out;
    }
    for (size_t r = 0; r < 32; ++r) {
        out.regs[r] = iv_join(a.regs[r], b.regs[r]);
    }
    out.hi = iv_join(a.hi, b.hi);
    out.lo = iv_join(a.lo, b.lo);
    out.mem.smashed = a.mem.smashed || b.mem.smashed;
    out.mem.overlay.clear();
    std::vector<Address> keys;
    for (const auto* m : {&a.mem, &b.mem}) {
        for (const auto& [addr, v] : m->overlay) {
            keys.push_back(addr);
        }
    }
    for (Address k : keys) {
        const Interval va = mem_word(a, ctx, k).value_or(Interval::top());
        const Interval vb = mem_word(b, ctx, k).value_or(Interval::top());
        out.mem.overlay[k] = iv_join(va, vb);
    }
    out.time = TimeRange{std::min(a.time.lo, b.time.lo), std::max(a.time.hi, b.time.hi)};
    return out;
}

} // namespace kta::detail
