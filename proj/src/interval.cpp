#include "kta/interval.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <vector>

namespace kta {

namespace {

constexpr int64_t kWordSpan = int64_t{1} << 32;

using Bounds = std::pair<int64_t, int64_t>;

Bounds full(View v) { return {view_min(v), view_max(v)}; }

// Bounds under v, treating a wrapping range as the whole view.
Bounds bounds_or_full(const Interval& x, View v) { return x.bounds(v).value_or(full(v)); }

int64_t bitfill(int64_t x) {
    if (x <= 0) {
        return 0;
    }
    const auto w = std::bit_width(static_cast<uint64_t>(x));
    return w >= 32 ? kUnsignedMax : (int64_t{1} << w) - 1;
}

View result_view(const Interval& a, const Interval& b) {
    if (a.is_range()) {
        return a.view();
    }
    if (b.is_range()) {
        return b.view();
    }
    return View::Signed;
}

bool both_singletons(const Interval& a, const Interval& b) { return a.is_singleton() && b.is_singleton(); }

} // namespace

Interval Interval::top() { return Interval(Kind::Top, 0, 0, View::Signed); }

Interval Interval::range(int64_t lo, int64_t hi, View view) {
    lo = std::max(lo, view_min(view));
    hi = std::min(hi, view_max(view));
    if (lo > hi) {
        return bottom();
    }
    if (lo == view_min(view) && hi == view_max(view)) {
        return top();
    }
    return Interval(Kind::Range, lo, hi, view);
}

Interval Interval::constant(Word w, View view) {
    const int64_t v = word_value(w, view);
    return Interval(Kind::Range, v, v, view);
}

std::optional<std::pair<int64_t, int64_t>> Interval::bounds(View v) const {
    switch (kind_) {
    case Kind::Bottom:
        return std::nullopt;
    case Kind::Top:
        return full(v);
    case Kind::Range:
        break;
    }
    if (view_ == v) {
        return Bounds{lo_, hi_};
    }
    if (v == View::Unsigned) {
        if (lo_ >= 0) {
            return Bounds{lo_, hi_};
        }
        if (hi_ < 0) {
            return Bounds{lo_ + kWordSpan, hi_ + kWordSpan};
        }
        return std::nullopt;
    }
    if (hi_ <= kSignedMax) {
        return Bounds{lo_, hi_};
    }
    if (lo_ > kSignedMax) {
        return Bounds{lo_ - kWordSpan, hi_ - kWordSpan};
    }
    return std::nullopt;
}

Interval Interval::in_view(View v) const {
    if (kind_ != Kind::Range) {
        return *this;
    }
    auto b = bounds(v);
    return b ? range(b->first, b->second, v) : top();
}

std::optional<Word> Interval::singleton() const {
    if (!is_singleton()) {
        return std::nullopt;
    }
    return value_word(lo_);
}

bool Interval::contains(Word w) const {
    switch (kind_) {
    case Kind::Bottom: return false;
    case Kind::Top: return true;
    case Kind::Range: break;
    }
    const int64_t v = word_value(w, view_);
    return v >= lo_ && v <= hi_;
}

uint64_t Interval::size() const {
    switch (kind_) {
    case Kind::Bottom: return 0;
    case Kind::Top: return uint64_t{1} << 32;
    case Kind::Range: break;
    }
    return static_cast<uint64_t>(hi_ - lo_) + 1;
}

bool Interval::subset_of(const Interval& o) const {
    if (is_bottom() || o.is_top()) {
        return true;
    }
    if (is_top() || o.is_bottom()) {
        return false;
    }
    if (auto b = bounds(o.view_)) {
        return b->first >= o.lo_ && b->second <= o.hi_;
    }
    if (auto b = o.bounds(view_)) {
        return lo_ >= b->first && hi_ <= b->second;
    }
    return false;
}

bool Interval::operator==(const Interval& o) const {
    if (kind_ != o.kind_) {
        return false;
    }
    if (kind_ != Kind::Range) {
        return true;
    }
    auto b = bounds(o.view_);
    return b && b->first == o.lo_ && b->second == o.hi_;
}

std::string Interval::to_string() const {
    switch (kind_) {
    case Kind::Bottom: return "bottom";
    case Kind::Top: return "top";
    case Kind::Range: break;
    }
    return "[" + std::to_string(lo_) + ", " + std::to_string(hi_) + "]" + (view_ == View::Unsigned ? "u" : "");
}

Interval iv_add(const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) {
        return Interval::bottom();
    }
    if (a.is_top() || b.is_top()) {
        return Interval::top();
    }
    const View v = a.view();
    auto bb = b.bounds(v);
    if (!bb) {
        return Interval::top();
    }
    const int64_t lo = a.lo() + bb->first;
    const int64_t hi = a.hi() + bb->second;
    if (lo < view_min(v) || hi > view_max(v)) {
        return Interval::top();
    }
    return Interval::range(lo, hi, v);
}

Interval iv_sub(const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) {
        return Interval::bottom();
    }
    if (a.is_top() || b.is_top()) {
        return Interval::top();
    }
    const View v = a.view();
    auto bb = b.bounds(v);
    if (!bb) {
        return Interval::top();
    }
    const int64_t lo = a.lo() - bb->second;
    const int64_t hi = a.hi() - bb->first;
    if (lo < view_min(v) || hi > view_max(v)) {
        return Interval::top();
    }
    return Interval::range(lo, hi, v);
}

namespace {

bool is_constant(const Interval& x, Word w) {
    auto v = x.singleton();
    return v && *v == w;
}

} // namespace

Interval iv_and(const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) {
        return Interval::bottom();
    }
    if (both_singletons(a, b)) {
        return Interval::constant(*a.singleton() & *b.singleton(), result_view(a, b));
    }
    if (is_constant(a, 0xffffffffu)) {
        return b;
    }
    if (is_constant(b, 0xffffffffu)) {
        return a;
    }
    // Masking with 2^k-1 leaves values already below the mask unchanged.
    for (const auto& [x, m] : {std::pair{&a, &b}, std::pair{&b, &a}}) {
        if (auto mw = m->singleton(); mw && ((*mw + 1) & *mw) == 0) {
            if (auto ux = x->bounds(View::Unsigned); ux && ux->second <= int64_t{*mw}) {
                return x->in_view(View::Unsigned);
            }
        }
    }
    // x & y never exceeds either operand as an unsigned number.
    int64_t cap = kUnsignedMax;
    if (auto ua = a.bounds(View::Unsigned)) {
        cap = std::min(cap, ua->second);
    }
    if (auto ub = b.bounds(View::Unsigned)) {
        cap = std::min(cap, ub->second);
    }
    return Interval::range(0, cap, View::Unsigned);
}

Interval iv_or(const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) {
        return Interval::bottom();
    }
    if (both_singletons(a, b)) {
        return Interval::constant(*a.singleton() | *b.singleton(), result_view(a, b));
    }
    if (is_constant(a, 0)) {
        return b;
    }
    if (is_constant(b, 0)) {
        return a;
    }
    auto ua = a.bounds(View::Unsigned);
    auto ub = b.bounds(View::Unsigned);
    if (!ua || !ub) {
        return Interval::top();
    }
    return Interval::range(std::max(ua->first, ub->first), bitfill(std::max(ua->second, ub->second)),
                           View::Unsigned);
}

Interval iv_xor(const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) {
        return Interval::bottom();
    }
    if (both_singletons(a, b)) {
        return Interval::constant(*a.singleton() ^ *b.singleton(), result_view(a, b));
    }
    if (is_constant(a, 0)) {
        return b;
    }
    if (is_constant(b, 0)) {
        return a;
    }
    auto ua = a.bounds(View::Unsigned);
    auto ub = b.bounds(View::Unsigned);
    if (!ua || !ub) {
        return Interval::top();
    }
    return Interval::range(0, bitfill(std::max(ua->second, ub->second)), View::Unsigned);
}

Interval iv_nor(const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) {
        return Interval::bottom();
    }
    if (both_singletons(a, b)) {
        return Interval::constant(~(*a.singleton() | *b.singleton()), result_view(a, b));
    }
    const Interval o = iv_or(a, b);
    // ~x == -1 - x, which is monotone in either view.
    if (auto so = o.bounds(View::Signed); so && o.view() == View::Signed) {
        return Interval::range(-1 - so->second, -1 - so->first, View::Signed);
    }
    auto uo = o.bounds(View::Unsigned);
    if (o.is_top() || !uo) {
        return Interval::top();
    }
    return Interval::range(kUnsignedMax - uo->second, kUnsignedMax - uo->first, View::Unsigned);
}

namespace {

Interval shift_by(ShiftKind kind, const Interval& value, unsigned s) {
    if (auto w = value.singleton()) {
        switch (kind) {
        case ShiftKind::Sll: return Interval::constant(*w << s, value.view());
        case ShiftKind::Srl: return Interval::constant(*w >> s, View::Unsigned);
        case ShiftKind::Sra:
            return Interval::constant(static_cast<Word>(static_cast<int32_t>(*w) >> s), View::Signed);
        }
    }
    if (s == 0) {
        return value;
    }
    switch (kind) {
    case ShiftKind::Sll: {
        if (auto u = value.bounds(View::Unsigned); u && (u->second << s) <= kUnsignedMax) {
            return Interval::range(u->first << s, u->second << s, View::Unsigned);
        }
        if (auto sg = value.bounds(View::Signed)) {
            const int64_t lo = sg->first * (int64_t{1} << s);
            const int64_t hi = sg->second * (int64_t{1} << s);
            if (lo >= kSignedMin && hi <= kSignedMax) {
                return Interval::range(lo, hi, View::Signed);
            }
        }
        return Interval::top();
    }
    case ShiftKind::Srl: {
        if (auto u = value.bounds(View::Unsigned)) {
            return Interval::range(u->first >> s, u->second >> s, View::Unsigned);
        }
        return Interval::range(0, kUnsignedMax >> s, View::Unsigned);
    }
    case ShiftKind::Sra: {
        if (auto sg = value.bounds(View::Signed)) {
            return Interval::range(sg->first >> s, sg->second >> s, View::Signed);
        }
        return Interval::range(kSignedMin >> s, kSignedMax >> s, View::Signed);
    }
    }
    return Interval::top();
}

} // namespace

Interval iv_shift(ShiftKind kind, const Interval& value, const Interval& amount) {
    if (value.is_bottom() || amount.is_bottom()) {
        return Interval::bottom();
    }
    std::vector<unsigned> amounts;
    auto ua = amount.bounds(View::Unsigned);
    if (ua && ua->second - ua->first < 32) {
        for (int64_t x = ua->first; x <= ua->second; ++x) {
            amounts.push_back(static_cast<unsigned>(x & 31));
        }
    } else if (auto sa = amount.bounds(View::Signed); sa && sa->second - sa->first < 32) {
        for (int64_t x = sa->first; x <= sa->second; ++x) {
            amounts.push_back(static_cast<unsigned>(static_cast<uint64_t>(x) & 31));
        }
    } else {
        for (unsigned s = 0; s < 32; ++s) {
            amounts.push_back(s);
        }
    }
    Interval out;
    for (unsigned s : amounts) {
        out = iv_join(out, shift_by(kind, value, s));
    }
    return out;
}

namespace {

Interval compare(const Interval& a, const Interval& b, View v) {
    if (a.is_bottom() || b.is_bottom()) {
        return Interval::bottom();
    }
    const auto [alo, ahi] = bounds_or_full(a, v);
    const auto [blo, bhi] = bounds_or_full(b, v);
    if (ahi < blo) {
        return Interval::constant(1);
    }
    if (alo >= bhi) {
        return Interval::constant(0);
    }
    return Interval::range(0, 1);
}

} // namespace

Interval iv_slt(const Interval& a, const Interval& b) { return compare(a, b, View::Signed); }
Interval iv_sltu(const Interval& a, const Interval& b) { return compare(a, b, View::Unsigned); }

ProductIntervals iv_mult(const Interval& a, const Interval& b, View view) {
    if (a.is_bottom() || b.is_bottom()) {
        return {Interval::bottom(), Interval::bottom()};
    }
    const auto [alo, ahi] = bounds_or_full(a, view);
    const auto [blo, bhi] = bounds_or_full(b, view);
    if (view == View::Signed) {
        const std::array<int64_t, 4> p = {alo * blo, alo * bhi, ahi * blo, ahi * bhi};
        const int64_t pmin = *std::min_element(p.begin(), p.end());
        const int64_t pmax = *std::max_element(p.begin(), p.end());
        const Interval hi = Interval::range(pmin >> 32, pmax >> 32, View::Signed);
        if (pmin == pmax) {
            return {Interval::constant(static_cast<Word>(pmin)), hi};
        }
        if (pmin >= kSignedMin && pmax <= kSignedMax) {
            return {Interval::range(pmin, pmax, View::Signed), hi};
        }
        return {Interval::top(), hi};
    }
    const auto pmin = static_cast<uint64_t>(alo) * static_cast<uint64_t>(blo);
    const auto pmax = static_cast<uint64_t>(ahi) * static_cast<uint64_t>(bhi);
    const Interval hi =
        Interval::range(static_cast<int64_t>(pmin >> 32), static_cast<int64_t>(pmax >> 32), View::Unsigned);
    if (pmin == pmax) {
        return {Interval::constant(static_cast<Word>(pmin), View::Unsigned), hi};
    }
    if (pmax <= static_cast<uint64_t>(kUnsignedMax)) {
        return {Interval::range(static_cast<int64_t>(pmin), static_cast<int64_t>(pmax), View::Unsigned), hi};
    }
    return {Interval::top(), hi};
}

QuotientIntervals iv_div(const Interval& a, const Interval& b, View view) {
    if (a.is_bottom() || b.is_bottom()) {
        return {Interval::bottom(), Interval::bottom()};
    }
    const auto [alo, ahi] = bounds_or_full(a, view);
    const auto [blo, bhi] = bounds_or_full(b, view);
    if (view == View::Unsigned) {
        const int64_t dlo = std::max<int64_t>(blo, 1);
        if (dlo > bhi) {
            return {Interval::bottom(), Interval::bottom()};
        }
        return {Interval::range(alo / bhi, ahi / dlo, View::Unsigned),
                Interval::range(0, std::min(ahi, bhi - 1), View::Unsigned)};
    }
    Interval quotient;
    int64_t max_abs = 0;
    // Truncating division is monotone in each argument on either side of
    // zero, so the extremes sit at the corners of each half.
    for (auto [dlo, dhi] : {Bounds{blo, std::min<int64_t>(bhi, -1)}, Bounds{std::max<int64_t>(blo, 1), bhi}}) {
        if (dlo > dhi) {
            continue;
        }
        max_abs = std::max({max_abs, std::abs(dlo), std::abs(dhi)});
        const std::array<int64_t, 4> q = {alo / dlo, alo / dhi, ahi / dlo, ahi / dhi};
        const int64_t qmin = *std::min_element(q.begin(), q.end());
        const int64_t qmax = *std::max_element(q.begin(), q.end());
        // INT_MIN / -1 wraps back to INT_MIN on the hardware.
        quotient = iv_join(quotient, qmax > kSignedMax ? Interval::top() : Interval::range(qmin, qmax, View::Signed));
    }
    if (quotient.is_bottom()) {
        return {Interval::bottom(), Interval::bottom()};
    }
    const int64_t rlo = alo >= 0 ? 0 : std::max(alo, -(max_abs - 1));
    const int64_t rhi = ahi <= 0 ? 0 : std::min(ahi, max_abs - 1);
    return {quotient, Interval::range(rlo, rhi, View::Signed)};
}

Interval iv_join(const Interval& a, const Interval& b) {
    if (a.is_bottom()) {
        return b;
    }
    if (b.is_bottom()) {
        return a;
    }
    if (a.is_top() || b.is_top()) {
        return Interval::top();
    }
    std::optional<Interval> best;
    // A hull can be tighter in either view, whatever the operands carry.
    for (View v : {View::Signed, View::Unsigned}) {
        auto ab = a.bounds(v);
        auto bb = b.bounds(v);
        if (!ab || !bb) {
            continue;
        }
        Interval cand = Interval::range(std::min(ab->first, bb->first), std::max(ab->second, bb->second), v);
        if (!best || cand.size() < best->size()) {
            best = cand;
        }
    }
    return best.value_or(Interval::top());
}

Interval iv_meet(const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) {
        return Interval::bottom();
    }
    if (a.is_top()) {
        return b;
    }
    if (b.is_top()) {
        return a;
    }
    if (auto bb = b.bounds(a.view())) {
        return Interval::range(std::max(a.lo(), bb->first), std::min(a.hi(), bb->second), a.view());
    }
    if (auto ab = a.bounds(b.view())) {
        return Interval::range(std::max(ab->first, b.lo()), std::min(ab->second, b.hi()), b.view());
    }
    // Both wrap in the other's view; keep the smaller operand.
    return a.size() <= b.size() ? a : b;
}

BranchCond negate(BranchCond c) {
    switch (c) {
    case BranchCond::Eq: return BranchCond::Ne;
    case BranchCond::Ne: return BranchCond::Eq;
    case BranchCond::Lez: return BranchCond::Gtz;
    case BranchCond::Gtz: return BranchCond::Lez;
    case BranchCond::Ltz: return BranchCond::Gez;
    case BranchCond::Gez: return BranchCond::Ltz;
    case BranchCond::Lt: return BranchCond::Ge;
    case BranchCond::Ge: return BranchCond::Lt;
    case BranchCond::Ltu: return BranchCond::Geu;
    case BranchCond::Geu: return BranchCond::Ltu;
    }
    return c;
}

namespace {

// x without the single word c, where that leaves a contiguous set.
Interval remove_word(const Interval& x, Word c) {
    if (x.is_top()) {
        for (View v : {View::Unsigned, View::Signed}) {
            const int64_t cv = word_value(c, v);
            if (cv == view_min(v)) {
                return Interval::range(cv + 1, view_max(v), v);
            }
            if (cv == view_max(v)) {
                return Interval::range(view_min(v), cv - 1, v);
            }
        }
        return x;
    }
    if (!x.is_range() || !x.contains(c)) {
        return x;
    }
    const int64_t cv = word_value(c, x.view());
    if (cv == x.lo()) {
        return Interval::range(x.lo() + 1, x.hi(), x.view());
    }
    if (cv == x.hi()) {
        return Interval::range(x.lo(), x.hi() - 1, x.view());
    }
    return x;
}

std::optional<OperandPair> feasible(Interval a, Interval b) {
    if (a.is_bottom() || b.is_bottom()) {
        return std::nullopt;
    }
    return OperandPair{std::move(a), std::move(b)};
}

std::optional<OperandPair> less_than(const Interval& a, const Interval& b, View v) {
    const auto [blo, bhi] = bounds_or_full(b, v);
    (void)blo;
    Interval a2 = iv_meet(a, Interval::range(view_min(v), bhi - 1, v));
    if (a2.is_bottom()) {
        return std::nullopt;
    }
    const auto [alo, ahi] = bounds_or_full(a2, v);
    (void)ahi;
    return feasible(a2, iv_meet(b, Interval::range(alo + 1, view_max(v), v)));
}

std::optional<OperandPair> greater_equal(const Interval& a, const Interval& b, View v) {
    const auto [blo, bhi] = bounds_or_full(b, v);
    (void)bhi;
    Interval a2 = iv_meet(a, Interval::range(blo, view_max(v), v));
    if (a2.is_bottom()) {
        return std::nullopt;
    }
    const auto [alo, ahi] = bounds_or_full(a2, v);
    (void)alo;
    return feasible(a2, iv_meet(b, Interval::range(view_min(v), ahi, v)));
}

std::optional<OperandPair> holds(BranchCond cond, const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) {
        return std::nullopt;
    }
    switch (cond) {
    case BranchCond::Eq: {
        Interval m = iv_meet(a, b);
        return feasible(m, m);
    }
    case BranchCond::Ne: {
        if (both_singletons(a, b) && *a.singleton() == *b.singleton()) {
            return std::nullopt;
        }
        Interval a2 = b.singleton() ? remove_word(a, *b.singleton()) : a;
        Interval b2 = a.singleton() ? remove_word(b, *a.singleton()) : b;
        return feasible(a2, b2);
    }
    case BranchCond::Lez: return feasible(iv_meet(a, Interval::range(kSignedMin, 0)), b);
    case BranchCond::Gtz: return feasible(iv_meet(a, Interval::range(1, kSignedMax)), b);
    case BranchCond::Ltz: return feasible(iv_meet(a, Interval::range(kSignedMin, -1)), b);
    case BranchCond::Gez: return feasible(iv_meet(a, Interval::range(0, kSignedMax)), b);
    case BranchCond::Lt: return less_than(a, b, View::Signed);
    case BranchCond::Ge: return greater_equal(a, b, View::Signed);
    case BranchCond::Ltu: return less_than(a, b, View::Unsigned);
    case BranchCond::Geu: return greater_equal(a, b, View::Unsigned);
    }
    return std::nullopt;
}

} // namespace

BranchRefinement refine_branch(BranchCond cond, const Interval& a, const Interval& b) {
    return BranchRefinement{holds(cond, a, b), holds(negate(cond), a, b)};
}

} // namespace kta
