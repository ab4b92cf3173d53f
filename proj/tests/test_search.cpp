#include "doctest.h"
#include "elf_builder.hpp"
#include "fixtures.hpp"
#include "kta/report.hpp"
#include "kta/search.hpp"
#include "oracles.hpp"

using namespace kta;
using namespace kta::test;

namespace {

Dimension dim(unsigned reg, int64_t lo, int64_t hi) { return Dimension{Location::reg(reg), lo, hi, View::Signed}; }

InputSpace space_of(std::initializer_list<const char*> texts) {
    std::vector<Dimension> dims;
    for (const char* t : texts) {
        dims.push_back(InputSpace::parse_dimension(t));
    }
    return InputSpace(std::move(dims));
}

ExhaustiveOracle oracle(const std::string& fix, const std::string& fn, const InputSpace& space) {
    const LoadedProgram& p = fixture(fix);
    return brute_force(Simulator(p, TimingModel{}), symbol_address(p, fn), space);
}

Cycles rerun(const std::string& fix, const std::string& fn, const InputBinding& in) {
    const LoadedProgram& p = fixture(fix);
    return Simulator(p, TimingModel{}).run(symbol_address(p, fn), in, 10'000'000).total_cycles;
}

} // namespace

TEST_SUITE("search") {

TEST_CASE("split halves the widest dimension") {
    auto [a, b] = split(Region{{dim(4, 0, 9)}});
    CHECK(a.dims[0].lo == 0);
    CHECK(a.dims[0].hi == 4);
    CHECK(b.dims[0].lo == 5);
    CHECK(b.dims[0].hi == 9);

    auto [c, d] = split(Region{{dim(4, 0, 10)}});
    CHECK(c.dims[0].hi == 5);
    CHECK(d.dims[0].lo == 6);

    auto [e, f] = split(Region{{dim(4, 0, 3), dim(5, 0, 7)}});
    CHECK(e.dims[0] == dim(4, 0, 3));
    CHECK(e.dims[1] == dim(5, 0, 3));
    CHECK(f.dims[1] == dim(5, 4, 7));

    // Ties go to the first dimension.
    auto [g, h] = split(Region{{dim(4, -4, 3), dim(5, 0, 7)}});
    CHECK(g.dims[0] == dim(4, -4, -1));
    CHECK(h.dims[1] == dim(5, 0, 7));

    CHECK(a.cardinality() + b.cardinality() == 10);
    CHECK_THROWS_AS(split(Region{{dim(4, 3, 3)}}), SearchError);
}

TEST_CASE("region basics") {
    const Region r{{dim(4, -3, 4), dim(5, 10, 10)}};
    CHECK(r.cardinality() == 8);
    CHECK_FALSE(r.is_singleton());
    const InputBinding m = r.midpoint();
    REQUIRE(m.size() == 2);
    CHECK(m[0].second == value_word(0));
    CHECK(m[1].second == 10);
    const AbstractBinding ab = r.abstract_binding();
    CHECK(ab[0].second == Interval::range(-3, 4));
    CHECK(ab[1].second == Interval::constant(10));
    CHECK_FALSE(r.to_string().empty());
}

TEST_CASE("single point space needs one concrete run") {
    const SearchResult r = optimal_wcet(fixture("countdown"), TimingModel{}, "countdown", space_of({"a0=9..9"}), 100000);
    CHECK(r.status == SearchStatus::Optimal);
    CHECK(r.concrete_evals == 1);
    CHECK(r.wcet == rerun("countdown", "countdown", {{Location::reg(4), 9}}));
}

TEST_CASE("countdown worst case is the largest count") {
    const InputSpace space = space_of({"a0=0..255"});
    const ExhaustiveOracle o = oracle("countdown", "countdown", space);
    const SearchResult r = optimal_wcet(fixture("countdown"), TimingModel{}, "countdown", space, 100000);
    CHECK(r.status == SearchStatus::Optimal);
    CHECK(r.wcet == o.max);
    REQUIRE(r.witness.size() == 1);
    CHECK(r.witness[0].second == 255);
    CHECK(r.max_time == 100000);
    CHECK(r.concrete_evals < 256);
}

TEST_CASE("classify prunes most of its space") {
    const InputSpace space = space_of({"a0=0..65535:unsigned"});
    const SearchResult r = optimal_wcet(fixture("classify"), TimingModel{}, "classify", space, 100000);
    CHECK(r.status == SearchStatus::Optimal);
    CHECK(r.wcet == rerun("classify", "classify", r.witness));
    CHECK(r.abs_evals + r.concrete_evals < 1000);
}

TEST_CASE("budget exceeded") {
    const InputSpace space = space_of({"a0=0..255"});
    const ExhaustiveOracle o = oracle("countdown", "countdown", space);
    for (Cycles t : {Cycles{1}, o.max / 2, o.max - 1}) {
        const SearchResult r = optimal_wcet(fixture("countdown"), TimingModel{}, "countdown", space, t);
        CHECK(r.status == SearchStatus::BudgetExceeded);
        CHECK(r.max_time == t);
    }
    // Reaching max_time counts as exceeding it.
    CHECK(optimal_wcet(fixture("countdown"), TimingModel{}, "countdown", space, o.max).status ==
          SearchStatus::BudgetExceeded);
    const SearchResult exact = optimal_wcet(fixture("countdown"), TimingModel{}, "countdown", space, o.max + 1);
    CHECK(exact.status == SearchStatus::Optimal);
    CHECK(exact.wcet == o.max);
}

TEST_CASE("a faulting input is reported") {
    const InputSpace space = space_of({"a0=2147483600..2147483647", "a1=0..100"});
    const SearchResult r = optimal_wcet(fixture("ops"), TimingModel{}, "trap_add", space, 1000);
    CHECK(r.status == SearchStatus::Fault);
    REQUIRE(r.fault.has_value());
    CHECK(r.fault->kind == FaultKind::Overflow);
    REQUIRE(r.fault_input.size() == 2);
    const auto a = static_cast<int32_t>(r.fault_input[0].second);
    const auto b = static_cast<int32_t>(r.fault_input[1].second);
    CHECK(int64_t{a} + b > INT32_MAX);

    const SearchResult safe =
        optimal_wcet(fixture("ops"), TimingModel{}, "trap_add", space_of({"a0=0..100", "a1=0..100"}), 1000);
    CHECK(safe.status == SearchStatus::Optimal);
}

TEST_CASE("pruned regions never hide a longer run") {
    SearchOptions opts;
    opts.record_prunes = true;
    for (const auto& b : optimality_benchmarks()) {
        CAPTURE(b.function);
        const InputSpace space = b.space();
        const ExhaustiveOracle o = oracle(b.fixture, b.function, space);
        const SearchResult r = optimal_wcet(fixture(b.fixture), TimingModel{}, b.function, space, 4 * o.max + 100, opts);
        REQUIRE(r.status == SearchStatus::Optimal);
        CHECK(r.wcet == o.max);
        CHECK(r.regions_pruned == r.prunes.size());
        for (const auto& p : r.prunes) {
            CHECK(p.upper <= p.lower_bound);
            const ExhaustiveOracle inside = oracle(b.fixture, b.function, InputSpace(p.region.dims));
            CHECK(inside.max <= p.upper);
        }
    }
}

TEST_CASE("parallel search and merging give the same answer") {
    for (const auto& b : optimality_benchmarks()) {
        CAPTURE(b.function);
        const InputSpace space = b.space();
        const SearchResult base = optimal_wcet(fixture(b.fixture), TimingModel{}, b.function, space, 100000);
        SearchOptions par;
        par.jobs = 4;
        const SearchResult p = optimal_wcet(fixture(b.fixture), TimingModel{}, b.function, space, 100000, par);
        SearchOptions merged;
        merged.merge = MergePolicy::BlockEntry;
        const SearchResult m = optimal_wcet(fixture(b.fixture), TimingModel{}, b.function, space, 100000, merged);
        CHECK(base.status == SearchStatus::Optimal);
        CHECK(p.status == base.status);
        CHECK(m.status == base.status);
        CHECK(p.wcet == base.wcet);
        CHECK(m.wcet == base.wcet);
        CHECK(rerun(b.fixture, b.function, p.witness) == p.wcet);
        CHECK(rerun(b.fixture, b.function, m.witness) == m.wcet);
    }
}

TEST_CASE("search results survive a JSON round trip") {
    const InputSpace space = space_of({"a0=-100..100"});
    const SearchResult r = optimal_wcet(fixture("branches"), TimingModel{}, "absval", space, 100000);
    const SearchResult back = search_result_from_json(to_json(r, space));
    CHECK(back.status == r.status);
    CHECK(back.wcet == r.wcet);
    CHECK(back.witness == r.witness);
    CHECK(back.abs_evals == r.abs_evals);
    CHECK(back.concrete_evals == r.concrete_evals);
    CHECK(back.regions_pruned == r.regions_pruned);
    CHECK(back.max_time == r.max_time);

    const InputSpace risky = space_of({"a0=2147483600..2147483647", "a1=0..100"});
    const SearchResult f = optimal_wcet(fixture("ops"), TimingModel{}, "trap_add", risky, 1000);
    const SearchResult fb = search_result_from_json(to_json(f, risky));
    REQUIRE(fb.fault.has_value());
    CHECK(fb.fault->kind == f.fault->kind);
    CHECK(fb.fault->pc == f.fault->pc);
    CHECK(fb.fault_input == f.fault_input);
    CHECK_THROWS(search_result_from_json(Json{{"status", "nope"}}));
}

} // TEST_SUITE
