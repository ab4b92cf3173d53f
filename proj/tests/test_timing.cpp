#include "doctest.h"
#include "kta/timing.hpp"

using namespace kta;
using M = Mnemonic;

namespace {

TimingError::Kind parse_error(std::string_view text, size_t* line = nullptr) {
    try {
        parse_timing_config(text);
    } catch (const TimingError& e) {
        if (line != nullptr) {
            *line = e.line();
        }
        return e.kind();
    }
    FAIL("parsed");
    return TimingError::Kind::SyntaxError;
}

} // namespace

TEST_SUITE("timing") {

TEST_CASE("default costs") {
    const TimingModel m;
    CHECK(m.cost(asm_::r(M::Add, 1, 2, 3), false) == 1);
    CHECK(m.cost(asm_::jr(31), false) == 1);
    CHECK(m.cost(M::Beq, true) == 1);
}

TEST_CASE("cost formula") {
    TimingModel m;
    m.set_memory_access_extra(2);
    CHECK(m.cost(asm_::mem(M::Lw, 1, 0, 29), false) == 3);
    CHECK(m.cost(M::Sb, false) == 3);
    m.set_branch_taken_extra(4);
    CHECK(m.cost(M::Bne, true) == 5);
    CHECK(m.cost(M::Bne, false) == 1);
    CHECK(m.cost(M::J, false) == 5);
    CHECK(m.cost(M::Jr, false) == 5);
    m.set_muldiv_cost(9);
    CHECK(m.cost(M::Divu, false) == 10);
    CHECK(m.cost(M::Mflo, false) == 1);
    m.set_base_cost(M::Mult, 3);
    CHECK(m.cost(M::Mult, false) == 12);
    CHECK_THROWS_AS(m.cost(Unknown{0xFC000000}, false), TimingError);
    CHECK_THROWS_AS(m.set_base_cost(M::Add, 0), TimingError);
}

TEST_CASE("config text") {
    CHECK(parse_timing_config("") == TimingModel{});
    CHECK(parse_timing_config("# nothing here\n\n   \n") == TimingModel{});
    const TimingModel m = parse_timing_config("memory_access_extra = 2");
    CHECK(m.cost(M::Lw, false) == 3);
    const TimingModel n = parse_timing_config("cost.mult = 4   # slow multiplier\n"
                                              "branch_taken_extra=1\n"
                                              "muldiv_cost = 2\n");
    CHECK(n.cost(M::Mult, false) == 6);
    CHECK(n.cost(M::Beq, true) == 2);
    CHECK(n.cost(M::Div, false) == 3);
}

TEST_CASE("config errors") {
    CHECK(parse_error("flux_capacitor = 1") == TimingError::Kind::UnknownKey);
    CHECK(parse_error("cost.syscall = 1") == TimingError::Kind::UnknownKey);
    CHECK(parse_error("cost.add = 0") == TimingError::Kind::NonPositiveCost);
    CHECK(parse_error("branch_taken_extra = -1") == TimingError::Kind::NonPositiveCost);
    size_t line = 0;
    CHECK(parse_error("muldiv_cost = 1\nmuldiv_cost 2", &line) == TimingError::Kind::SyntaxError);
    CHECK(line == 2);
    CHECK(parse_error("muldiv_cost = two") == TimingError::Kind::SyntaxError);
    CHECK(parse_error("muldiv_cost = 2 3") == TimingError::Kind::SyntaxError);
}

} // TEST_SUITE
