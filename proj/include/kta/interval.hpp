#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "kta/inputs.hpp"

namespace kta {

// A set of 32-bit machine words described as a contiguous integer range
// under a signedness view. Top is every word; Bottom is no word.
//
// Ranges that cover an entire view are normalized to Top, so is_top() is
// exact. Equality compares concretizations, not representations.
class Interval {
  public:
    enum class Kind : uint8_t { Bottom, Range, Top };

    Interval() = default; // Bottom

    static Interval bottom() { return {}; }
    static Interval top();
    // Empty when lo > hi. Bounds are clamped to the view's range.
    static Interval range(int64_t lo, int64_t hi, View view = View::Signed);
    static Interval constant(Word w, View view = View::Signed);

    Kind kind() const { return kind_; }
    bool is_bottom() const { return kind_ == Kind::Bottom; }
    bool is_top() const { return kind_ == Kind::Top; }
    bool is_range() const { return kind_ == Kind::Range; }

    // Only meaningful for ranges.
    int64_t lo() const { return lo_; }
    int64_t hi() const { return hi_; }
    View view() const { return view_; }

    // Bounds under `v`: Top gives the full view range; a range that wraps
    // across the view boundary gives nullopt. Bottom gives nullopt.
    std::optional<std::pair<int64_t, int64_t>> bounds(View v) const;
    // This set re-expressed in view `v`, or Top if it wraps.
    Interval in_view(View v) const;

    bool is_singleton() const { return kind_ == Kind::Range && lo_ == hi_; }
    std::optional<Word> singleton() const;
    bool contains(Word w) const;
    // Number of words in the set.
    uint64_t size() const;
    // Whether every word of this set is in `other`.
    bool subset_of(const Interval& other) const;

    bool operator==(const Interval& o) const;

    std::string to_string() const;

  private:
    Interval(Kind k, int64_t lo, int64_t hi, View v) : kind_(k), view_(v), lo_(lo), hi_(hi) {}

    Kind kind_ = Kind::Bottom;
    View view_ = View::Signed;
    int64_t lo_ = 0;
    int64_t hi_ = 0;
};

// Arithmetic is carried out in the view of the first range operand. A result
// that leaves that view's 32-bit range becomes Top. Any Bottom operand gives
// Bottom.
Interval iv_add(const Interval& a, const Interval& b);
Interval iv_sub(const Interval& a, const Interval& b);

Interval iv_and(const Interval& a, const Interval& b);
Interval iv_or(const Interval& a, const Interval& b);
Interval iv_xor(const Interval& a, const Interval& b);
Interval iv_nor(const Interval& a, const Interval& b);

enum class ShiftKind { Sll, Srl, Sra };
// Shift amounts use their low five bits, as the hardware does.
Interval iv_shift(ShiftKind kind, const Interval& value, const Interval& amount);

// Subsets of [0, 1].
Interval iv_slt(const Interval& a, const Interval& b);
Interval iv_sltu(const Interval& a, const Interval& b);

struct ProductIntervals {
    Interval lo;
    Interval hi;
};
ProductIntervals iv_mult(const Interval& a, const Interval& b, View view);

struct QuotientIntervals {
    Interval quotient;
    Interval remainder;
};
// Covers the non-zero divisors only; a divisor set of {0} gives Bottom.
QuotientIntervals iv_div(const Interval& a, const Interval& b, View view);

Interval iv_join(const Interval& a, const Interval& b);
Interval iv_meet(const Interval& a, const Interval& b);

// Lt/Ge compare signed, Ltu/Geu unsigned; the rest compare the first
// operand against zero, except Eq/Ne.
enum class BranchCond { Eq, Ne, Lez, Gtz, Ltz, Gez, Lt, Ge, Ltu, Geu };

BranchCond negate(BranchCond c);

using OperandPair = std::pair<Interval, Interval>;

struct BranchRefinement {
    std::optional<OperandPair> taken;
    std::optional<OperandPair> not_taken;
};

// Operands narrowed under the condition and under its negation. For the
// compare-with-zero conditions the second operand is passed through.
BranchRefinement refine_branch(BranchCond cond, const Interval& a, const Interval& b);

} // namespace kta
