#include "kta/timing.hpp"

#include <cctype>
#include <charconv>
#include <limits>

namespace kta {

void TimingModel::set_base_cost(Mnemonic m, Cycles c) {
    if (c == 0) {
        throw TimingError(TimingError::Kind::NonPositiveCost,
                          "cost of " + std::string(mnemonic_name(m)) + " must be at least 1");
    }
    base_cost_[static_cast<size_t>(m)] = c;
}

Cycles TimingModel::cost(Mnemonic m, bool taken) const {
    Cycles c = base_cost(m);
    if (is_jump(m) || (is_cond_branch(m) && taken)) {
        c += branch_taken_extra_;
    }
    if (is_memory(m)) {
        c += memory_access_extra_;
    }
    if (is_muldiv(m)) {
        c += muldiv_cost_;
    }
    return c;
}

Cycles TimingModel::cost(const Instruction& instr, bool taken) const {
    auto m = mnemonic_of(instr);
    if (!m) {
        throw TimingError(TimingError::Kind::UnsupportedInstruction, "no cost for unsupported instruction");
    }
    return cost(*m, taken);
}

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

bool is_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.';
}

} // namespace

TimingModel parse_timing_config(std::string_view text) {
    TimingModel model;
    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        const std::string_view line = text.substr(pos, eol - pos);
        ++line_no;
        pos = eol + 1;

        auto syntax = [&](size_t col, const std::string& msg) {
            return TimingError(TimingError::Kind::SyntaxError,
                               "line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) + ": " + msg,
                               line_no, col + 1);
        };

        size_t i = 0;
        auto skip_blank = [&] {
            while (i < line.size() && is_blank(line[i])) {
                ++i;
            }
        };
        skip_blank();
        if (i == line.size() || line[i] == '#') {
            continue;
        }
        const size_t key_begin = i;
        while (i < line.size() && is_key_char(line[i])) {
            ++i;
        }
        if (i == key_begin) {
            throw syntax(i, "expected a key");
        }
        const std::string_view key = line.substr(key_begin, i - key_begin);
        skip_blank();
        if (i == line.size() || line[i] != '=') {
            throw syntax(i, "expected '='");
        }
        ++i;
        skip_blank();
        const size_t value_col = i;
        int64_t value = 0;
        const char* first = line.data() + i;
        const char* last = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{}) {
            throw syntax(value_col, "expected an integer");
        }
        i += static_cast<size_t>(ptr - first);
        skip_blank();
        if (i < line.size() && line[i] != '#') {
            throw syntax(i, "unexpected trailing text");
        }

        auto key_error = [&] {
            return TimingError(TimingError::Kind::UnknownKey,
                               "line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'", line_no,
                               key_begin + 1);
        };
        auto non_positive = [&](const char* rule) {
            return TimingError(TimingError::Kind::NonPositiveCost,
                               "line " + std::to_string(line_no) + ": '" + std::string(key) + "' " + rule, line_no,
                               value_col + 1);
        };

        if (key.starts_with("cost.")) {
            auto m = mnemonic_from_name(key.substr(5));
            if (!m) {
                throw key_error();
            }
            if (value < 1) {
                throw non_positive("must be at least 1");
            }
            model.set_base_cost(*m, static_cast<Cycles>(value));
            continue;
        }
        if (key != "branch_taken_extra" && key != "memory_access_extra" && key != "muldiv_cost") {
            throw key_error();
        }
        if (value < 0) {
            throw non_positive("must not be negative");
        }
        const auto cycles = static_cast<Cycles>(value);
        if (key == "branch_taken_extra") {
            model.set_branch_taken_extra(cycles);
        } else if (key == "memory_access_extra") {
            model.set_memory_access_extra(cycles);
        } else {
            model.set_muldiv_cost(cycles);
        }
    }
    return model;
}

} // namespace kta
