#include <algorithm>
#include <functional>
#include <random>

#include "doctest.h"
#include "kta/interval.hpp"

using namespace kta;

namespace {

Interval s(int64_t lo, int64_t hi) { return Interval::range(lo, hi, View::Signed); }
Interval u(int64_t lo, int64_t hi) { return Interval::range(lo, hi, View::Unsigned); }
Interval c(Word w) { return Interval::constant(w); }

struct Gen {
    std::mt19937_64 rng{12345};

    int64_t pick(int64_t lo, int64_t hi) { return std::uniform_int_distribution<int64_t>(lo, hi)(rng); }

    Interval interval() {
        for (;;) {
            if (Interval x = candidate(); !x.is_bottom()) {
                return x;
            }
        }
    }

    Interval candidate() {
        const View v = pick(0, 1) ? View::Signed : View::Unsigned;
        switch (pick(0, 5)) {
        case 0: return Interval::top();
        case 1: return Interval::constant(static_cast<Word>(pick(-40, 40)), v);
        case 2: {
            const int64_t a = pick(view_min(v), view_max(v));
            const int64_t b = pick(view_min(v), view_max(v));
            return Interval::range(std::min(a, b), std::max(a, b), v);
        }
        case 3: {
            // Near the signed or unsigned boundary.
            const int64_t base = pick(0, 1) ? view_max(v) : view_min(v);
            const int64_t a = std::clamp<int64_t>(base + pick(-70, 70), view_min(v), view_max(v));
            return Interval::range(std::max<int64_t>(a - pick(0, 50), view_min(v)), a, v);
        }
        default: {
            const int64_t a = pick(-300, 300);
            return Interval::range(a, a + pick(0, 64), v);
        }
        }
    }

    Word element(const Interval& x) {
        if (x.is_top()) {
            return static_cast<Word>(rng());
        }
        return value_word(pick(x.lo(), x.hi()));
    }
};

// Every concrete result of op over sampled members lies in the abstract result.
void check_sound(const std::function<Interval(const Interval&, const Interval&)>& abs,
                 const std::function<std::optional<Word>(Word, Word)>& conc, int rounds = 4000) {
    Gen g;
    for (int k = 0; k < rounds; ++k) {
        const Interval a = g.interval();
        const Interval b = g.interval();
        const Interval r = abs(a, b);
        for (int j = 0; j < 8; ++j) {
            const Word x = g.element(a);
            const Word y = g.element(b);
            const auto z = conc(x, y);
            if (!z) {
                continue;
            }
            if (!r.contains(*z)) {
                FAIL_CHECK(a.to_string() << " op " << b.to_string() << " = " << r.to_string() << " misses " << *z
                                         << " from " << x << ", " << y);
                return;
            }
        }
    }
}

bool holds(BranchCond cond, Word a, Word b) {
    const auto sa = static_cast<int32_t>(a);
    const auto sb = static_cast<int32_t>(b);
    switch (cond) {
    case BranchCond::Eq: return a == b;
    case BranchCond::Ne: return a != b;
    case BranchCond::Lez: return sa <= 0;
    case BranchCond::Gtz: return sa > 0;
    case BranchCond::Ltz: return sa < 0;
    case BranchCond::Gez: return sa >= 0;
    case BranchCond::Lt: return sa < sb;
    case BranchCond::Ge: return sa >= sb;
    case BranchCond::Ltu: return a < b;
    case BranchCond::Geu: return a >= b;
    }
    return false;
}

} // namespace

TEST_SUITE("interval") {

TEST_CASE("construction and normalization") {
    CHECK(Interval().is_bottom());
    CHECK(s(3, 1).is_bottom());
    CHECK(s(kSignedMin, kSignedMax).is_top());
    CHECK(u(0, kUnsignedMax).is_top());
    CHECK(c(5).is_singleton());
    CHECK(c(5) == u(5, 5));
    CHECK(s(-1, -1) == u(kUnsignedMax, kUnsignedMax));
    CHECK(s(-2, 2).size() == 5);
    CHECK(Interval::top().size() == (uint64_t{1} << 32));
    CHECK(s(-2, 2).contains(0xfffffffe));
    CHECK_FALSE(s(-2, 2).contains(3));
    CHECK(s(-2, 2).in_view(View::Unsigned).is_top());
    CHECK(s(3, 9).in_view(View::Unsigned) == u(3, 9));
    CHECK_FALSE(s(-1, 1).bounds(View::Unsigned).has_value());
    CHECK(s(1, 2).subset_of(u(0, 5)));
    CHECK(s(1, 2).to_string() == "[1, 2]");
    CHECK(u(1, 2).to_string() == "[1, 2]u");
    CHECK(Interval::top().to_string() == "top");
}

TEST_CASE("arithmetic examples") {
    CHECK(iv_add(s(1, 3), s(2, 5)) == s(3, 8));
    CHECK(iv_add(c(0x7FFFFFFF), c(1)).is_top());
    CHECK(iv_add(u(0xFFFFFFF0, 0xFFFFFFF0), c(0x20)).is_top());
    CHECK(iv_sub(s(0, 10), s(1, 2)) == s(-2, 9));
    CHECK(iv_slt(s(0, 3), c(10)) == c(1));
    CHECK(iv_slt(s(10, 30), c(10)) == c(0));
    CHECK(iv_slt(s(0, 30), c(10)) == s(0, 1));
    CHECK(iv_sltu(s(-1, -1), c(10)) == c(0));
    CHECK(iv_and(c(0xF0), c(0x3C)) == c(0x30));
    CHECK(iv_and(s(0, 100000), c(0xff)) == u(0, 0xff));
    CHECK(iv_and(s(0, 100), c(0xff)) == s(0, 100));
    CHECK(iv_or(s(3, 9), c(0)) == s(3, 9));
    CHECK(iv_xor(c(0), s(-4, 4)) == s(-4, 4));
    CHECK(iv_nor(s(0, 5), c(0)) == s(-6, -1));
    CHECK(iv_shift(ShiftKind::Sll, s(1, 3), c(2)) == s(4, 12));
    CHECK(iv_shift(ShiftKind::Srl, u(16, 64), s(1, 2)) == u(4, 32));
    CHECK(iv_shift(ShiftKind::Sra, s(-64, 64), c(33)) == s(-32, 32));
    CHECK(iv_add(Interval(), s(1, 1)).is_bottom());
}

TEST_CASE("multiply and divide examples") {
    const ProductIntervals p = iv_mult(s(-3, 4), s(2, 5), View::Signed);
    CHECK(p.lo == s(-15, 20));
    CHECK(p.hi == s(-1, 0));
    const QuotientIntervals q = iv_div(s(-20, 20), s(2, 5), View::Signed);
    CHECK(q.quotient == s(-10, 10));
    CHECK(q.remainder.subset_of(s(-4, 4)));
    const QuotientIntervals z = iv_div(s(1, 2), c(0), View::Unsigned);
    CHECK(z.quotient.is_bottom());
    const QuotientIntervals w = iv_div(c(0x80000000), c(0xffffffff), View::Signed);
    CHECK(w.quotient.contains(0x80000000));
    CHECK(w.remainder == c(0));
}

TEST_CASE("join and meet") {
    CHECK(iv_join(s(0, 1), s(5, 9)) == s(0, 9));
    CHECK(iv_meet(s(0, 4), s(3, 9)) == s(3, 4));
    CHECK(iv_meet(s(0, 1), s(5, 9)).is_bottom());
    CHECK(iv_join(Interval(), s(2, 3)) == s(2, 3));
    CHECK(iv_meet(Interval::top(), s(2, 3)) == s(2, 3));
    CHECK(iv_join(s(-1, -1), c(5)) == s(-1, 5));
    CHECK(iv_join(u(0xfffffff0, 0xfffffff0), u(1, 1)).size() <= 18);
}

TEST_CASE("branch refinement examples") {
    const BranchRefinement eq = refine_branch(BranchCond::Eq, c(0), c(0));
    REQUIRE(eq.taken);
    CHECK(eq.taken->first == c(0));
    CHECK(eq.taken->second == c(0));
    CHECK_FALSE(eq.not_taken);

    const BranchRefinement ne = refine_branch(BranchCond::Ne, s(0, 5), c(3));
    REQUIRE(ne.taken);
    REQUIRE(ne.not_taken);
    CHECK(ne.taken->first == s(0, 5));
    CHECK(ne.not_taken->first == c(3));

    const BranchRefinement gez = refine_branch(BranchCond::Gez, s(-4, 7), c(0));
    REQUIRE(gez.taken);
    REQUIRE(gez.not_taken);
    CHECK(gez.taken->first == s(0, 7));
    CHECK(gez.not_taken->first == s(-4, -1));

    const BranchRefinement trim = refine_branch(BranchCond::Ne, s(0, 5), c(5));
    CHECK(trim.taken->first == s(0, 4));

    const BranchRefinement lt = refine_branch(BranchCond::Lt, s(0, 10), s(3, 6));
    CHECK(lt.taken->first == s(0, 5));
    CHECK(lt.not_taken->first == s(3, 10));
    CHECK(lt.not_taken->second == s(3, 6));
}

TEST_CASE("negation pairs") {
    for (auto cond : {BranchCond::Eq, BranchCond::Ne, BranchCond::Lez, BranchCond::Gtz, BranchCond::Ltz,
                      BranchCond::Gez, BranchCond::Lt, BranchCond::Ge, BranchCond::Ltu, BranchCond::Geu}) {
        CHECK(negate(negate(cond)) == cond);
        CHECK(negate(cond) != cond);
        CHECK(holds(cond, 3, 7) != holds(negate(cond), 3, 7));
    }
}

TEST_CASE("operations are sound on sampled members") {
    auto w = [](auto f) { return [f](Word x, Word y) -> std::optional<Word> { return f(x, y); }; };
    check_sound(iv_add, w([](Word x, Word y) { return x + y; }));
    check_sound(iv_sub, w([](Word x, Word y) { return x - y; }));
    check_sound(iv_and, w([](Word x, Word y) { return x & y; }));
    check_sound(iv_or, w([](Word x, Word y) { return x | y; }));
    check_sound(iv_xor, w([](Word x, Word y) { return x ^ y; }));
    check_sound(iv_nor, w([](Word x, Word y) { return ~(x | y); }));
    check_sound(iv_slt, w([](Word x, Word y) { return Word{static_cast<int32_t>(x) < static_cast<int32_t>(y)}; }));
    check_sound(iv_sltu, w([](Word x, Word y) { return Word{x < y}; }));
    check_sound([](const Interval& a, const Interval& b) { return iv_shift(ShiftKind::Sll, a, b); },
                w([](Word x, Word y) { return x << (y & 31); }));
    check_sound([](const Interval& a, const Interval& b) { return iv_shift(ShiftKind::Srl, a, b); },
                w([](Word x, Word y) { return x >> (y & 31); }));
    check_sound([](const Interval& a, const Interval& b) { return iv_shift(ShiftKind::Sra, a, b); },
                w([](Word x, Word y) { return static_cast<Word>(static_cast<int32_t>(x) >> (y & 31)); }));
    for (View v : {View::Signed, View::Unsigned}) {
        check_sound([v](const Interval& a, const Interval& b) { return iv_mult(a, b, v).lo; },
                    w([v](Word x, Word y) {
                        return static_cast<Word>(word_value(x, v) * word_value(y, v));
                    }));
        check_sound([v](const Interval& a, const Interval& b) { return iv_mult(a, b, v).hi; },
                    w([v](Word x, Word y) {
                        return static_cast<Word>(static_cast<uint64_t>(word_value(x, v) * word_value(y, v)) >> 32);
                    }));
    }
    auto div = [](bool quotient, View v) {
        return [quotient, v](Word x, Word y) -> std::optional<Word> {
            if (y == 0) {
                return std::nullopt;
            }
            if (v == View::Unsigned) {
                return quotient ? x / y : x % y;
            }
            const auto sx = static_cast<int32_t>(x);
            const auto sy = static_cast<int32_t>(y);
            if (sx == INT32_MIN && sy == -1) {
                return quotient ? x : 0;
            }
            return static_cast<Word>(quotient ? sx / sy : sx % sy);
        };
    };
    for (View v : {View::Signed, View::Unsigned}) {
        check_sound([v](const Interval& a, const Interval& b) { return iv_div(a, b, v).quotient; }, div(true, v));
        check_sound([v](const Interval& a, const Interval& b) { return iv_div(a, b, v).remainder; }, div(false, v));
    }
}

TEST_CASE("join and meet are sound on sampled members") {
    Gen g;
    for (int k = 0; k < 4000; ++k) {
        const Interval a = g.interval();
        const Interval b = g.interval();
        const Interval j = iv_join(a, b);
        const Interval m = iv_meet(a, b);
        CHECK(a.subset_of(j));
        CHECK(b.subset_of(j));
        // Across views the exact meet can be two pieces, so only same-view
        // operands promise a sub-range.
        if (a.is_range() && b.is_range() && a.view() == b.view()) {
            CHECK(m.subset_of(a));
            CHECK(m.subset_of(b));
        }
        for (int t = 0; t < 8; ++t) {
            const Word x = g.element(a);
            if (b.contains(x)) {
                REQUIRE(m.contains(x));
            }
        }
    }
}

TEST_CASE("branch refinement keeps every satisfying pair") {
    Gen g;
    for (auto cond : {BranchCond::Eq, BranchCond::Ne, BranchCond::Lez, BranchCond::Gtz, BranchCond::Ltz,
                      BranchCond::Gez, BranchCond::Lt, BranchCond::Ge, BranchCond::Ltu, BranchCond::Geu}) {
        for (int k = 0; k < 1500; ++k) {
            const Interval a = g.interval();
            const bool zero = cond == BranchCond::Lez || cond == BranchCond::Gtz || cond == BranchCond::Ltz ||
                              cond == BranchCond::Gez;
            const Interval b = zero ? c(0) : g.interval();
            const BranchRefinement r = refine_branch(cond, a, b);
            for (int t = 0; t < 8; ++t) {
                const Word x = t == 0 && a.is_range() ? value_word(a.lo()) : g.element(a);
                const Word y = t == 1 && b.is_range() ? value_word(b.hi()) : g.element(b);
                const auto& side = holds(cond, x, y) ? r.taken : r.not_taken;
                REQUIRE(side.has_value());
                REQUIRE(side->first.contains(x));
                REQUIRE(side->second.contains(y));
            }
        }
    }
}

} // TEST_SUITE
