#include "kta/exhaustive.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <set>
#include <thread>

namespace kta {

InputSpace::InputSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {
    std::set<Location> seen;
    for (const auto& d : dims_) {
        if (!seen.insert(d.location).second) {
            throw InputError("input location " + d.location.to_string() + " appears twice");
        }
        if (d.lo > d.hi) {
            throw InputError("empty range for " + d.location.to_string());
        }
        if (d.lo < view_min(d.view) || d.hi > view_max(d.view)) {
            throw InputError("range for " + d.location.to_string() + " exceeds the " +
                             std::string(view_name(d.view)) + " 32-bit range");
        }
        const uint64_t card = d.cardinality();
        if (cardinality_ > std::numeric_limits<uint64_t>::max() / card) {
            throw InputError("input space cardinality does not fit in 64 bits");
        }
        cardinality_ *= card;
    }
}

InputBinding InputSpace::binding_at(uint64_t index) const {
    InputBinding b(dims_.size(), {Location::reg(4), 0});
    for (size_t k = dims_.size(); k-- > 0;) {
        const auto& d = dims_[k];
        const uint64_t card = d.cardinality();
        b[k] = {d.location, value_word(d.lo + static_cast<int64_t>(index % card))};
        index /= card;
    }
    return b;
}

namespace {

int64_t parse_int(std::string_view s, std::string_view whole) {
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        s.remove_prefix(1);
    }
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        base = 16;
        s.remove_prefix(2);
    }
    int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InputError("bad integer in input expression '" + std::string(whole) + "'");
    }
    return neg ? -v : v;
}

} // namespace

Dimension InputSpace::parse_dimension(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
        throw InputError("input expression '" + std::string(text) + "' has no '='");
    }
    Dimension d{Location::parse(text.substr(0, eq)), 0, 0, View::Signed};
    std::string_view rhs = text.substr(eq + 1);
    if (auto colon = rhs.rfind(':'); colon != std::string_view::npos) {
        const auto view = rhs.substr(colon + 1);
        if (view == "signed") {
            d.view = View::Signed;
        } else if (view == "unsigned") {
            d.view = View::Unsigned;
        } else {
            throw InputError("unknown view '" + std::string(view) + "' in '" + std::string(text) + "'");
        }
        rhs = rhs.substr(0, colon);
    }
    if (auto dots = rhs.find(".."); dots != std::string_view::npos) {
        d.lo = parse_int(rhs.substr(0, dots), text);
        d.hi = parse_int(rhs.substr(dots + 2), text);
    } else {
        d.lo = d.hi = parse_int(rhs, text);
    }
    return d;
}

std::vector<Cycles> pair_deltas(const std::vector<TimingEvent>& events, const std::string& from,
                                const std::string& to) {
    std::vector<Cycles> out;
    for (size_t i = 0; i < events.size(); ++i) {
        if (events[i].id != from) {
            continue;
        }
        for (size_t j = i + 1; j < events.size(); ++j) {
            if (events[j].id == to) {
                out.push_back(events[j].cycles - events[i].cycles);
                break;
            }
        }
    }
    return out;
}

namespace {

// Max/min with the index of the first binding that attains each.
struct Extremes {
    bool seen = false;
    Cycles max = 0;
    Cycles min = 0;
    uint64_t max_index = 0;
    uint64_t min_index = 0;
    uint64_t samples = 0;

    void add(Cycles v, uint64_t index) {
        ++samples;
        if (!seen) {
            seen = true;
            max = min = v;
            max_index = min_index = index;
            return;
        }
        if (v > max || (v == max && index < max_index)) {
            max = v;
            max_index = index;
        }
        if (v < min || (v == min && index < min_index)) {
            min = v;
            min_index = index;
        }
    }

    void merge(const Extremes& o) {
        if (!o.seen) {
            return;
        }
        const uint64_t samples_before = samples;
        add(o.max, o.max_index);
        add(o.min, o.min_index);
        samples = samples_before + o.samples;
    }
};

struct Partial {
    Extremes total;
    std::vector<Extremes> pairs;
    std::optional<uint64_t> error_index;
    std::optional<RunResult> error_run;
};

} // namespace

FineGrainedReport analyze(const Simulator& sim, const std::string& function, Address entry,
                          const InputSpace& space, const TimingPointTable& tp_table,
                          const std::vector<TimingQuery>& queries, const ExhaustiveOptions& options) {
    for (const auto& [from, to] : queries) {
        for (const auto* id : {&from, &to}) {
            if (!tp_table.contains(*id)) {
                throw ExhaustiveError(ExhaustiveError::Kind::UnknownTimingPoint,
                                      "timing point '" + *id + "' is not defined");
            }
        }
    }

    const uint64_t n = space.cardinality();
    const unsigned jobs = static_cast<unsigned>(std::clamp<uint64_t>(options.jobs, 1, std::max<uint64_t>(n, 1)));
    std::vector<Partial> partials(jobs);
    auto work = [&](unsigned chunk) {
        Partial& p = partials[chunk];
        p.pairs.resize(queries.size());
        const uint64_t begin = n * chunk / jobs;
        const uint64_t end = n * (chunk + 1) / jobs;
        for (uint64_t idx = begin; idx < end; ++idx) {
            RunResult r = sim.run(entry, space.binding_at(idx), options.step_budget, tp_table);
            if (r.status != RunStatus::Finished) {
                p.error_index = idx;
                p.error_run = std::move(r);
                return;
            }
            p.total.add(r.total_cycles, idx);
            for (size_t q = 0; q < queries.size(); ++q) {
                for (Cycles d : pair_deltas(r.tp_events, queries[q].first, queries[q].second)) {
                    p.pairs[q].add(d, idx);
                }
            }
        }
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::jthread> threads;
        for (unsigned c = 0; c < jobs; ++c) {
            threads.emplace_back(work, c);
        }
    }

    Partial all;
    all.pairs.resize(queries.size());
    for (auto& p : partials) {
        if (p.error_index) {
            const InputBinding binding = space.binding_at(*p.error_index);
            const RunResult& r = *p.error_run;
            if (r.status == RunStatus::Fault) {
                throw ExhaustiveError(ExhaustiveError::Kind::FaultyInput,
                                      "input " + binding_to_string(binding) + " faults: " + r.fault->message, binding);
            }
            throw ExhaustiveError(ExhaustiveError::Kind::BudgetExceeded,
                                  "input " + binding_to_string(binding) + " exceeds the step budget", binding);
        }
        all.total.merge(p.total);
        for (size_t q = 0; q < queries.size(); ++q) {
            all.pairs[q].merge(p.pairs[q]);
        }
    }

    FineGrainedReport report;
    report.function = function;
    report.space = space;
    report.runs = n;
    report.total = TotalReport{all.total.max, all.total.min, space.binding_at(all.total.max_index),
                               space.binding_at(all.total.min_index)};
    for (size_t q = 0; q < queries.size(); ++q) {
        const Extremes& e = all.pairs[q];
        if (!e.seen) {
            throw ExhaustiveError(ExhaustiveError::Kind::NoObservation,
                                  "timing points " + queries[q].first + " -> " + queries[q].second +
                                      " were never observed in order");
        }
        report.pairs.push_back(PairReport{queries[q].first, queries[q].second, e.max, e.min,
                                          space.binding_at(e.max_index), space.binding_at(e.min_index), e.samples});
    }
    return report;
}

FineGrainedReport analyze(const LoadedProgram& prog, const TimingModel& model, const std::string& function,
                          const InputSpace& space, const TimingPointTable& tp_table,
                          const std::vector<TimingQuery>& queries, const ExhaustiveOptions& options) {
    Simulator sim(prog, model);
    return analyze(sim, function, symbol_address(prog, function), space, tp_table, queries, options);
}

} // namespace kta
