#include "kta/search.hpp"

#include <future>
#include <queue>

namespace kta {

uint64_t Region::cardinality() const {
    uint64_t n = 1;
    for (const auto& d : dims) {
        n *= d.cardinality();
    }
    return n;
}

InputBinding Region::midpoint() const {
    InputBinding b;
    for (const auto& d : dims) {
        b.emplace_back(d.location, value_word(d.lo + (d.hi - d.lo) / 2));
    }
    return b;
}

AbstractBinding Region::abstract_binding() const {
    AbstractBinding b;
    for (const auto& d : dims) {
        b.emplace_back(d.location, Interval::range(d.lo, d.hi, d.view));
    }
    return b;
}

std::string Region::to_string() const {
    std::string out;
    for (const auto& d : dims) {
        if (!out.empty()) {
            out += ' ';
        }
        out += d.location.to_string() + "=" + std::to_string(d.lo) + ".." + std::to_string(d.hi);
    }
    return out;
}

std::pair<Region, Region> split(const Region& region) {
    size_t best = 0;
    for (size_t i = 1; i < region.dims.size(); ++i) {
        if (region.dims[i].cardinality() > region.dims[best].cardinality()) {
            best = i;
        }
    }
    if (region.dims.empty() || region.dims[best].cardinality() < 2) {
        throw SearchError(SearchError::Kind::CannotSplitSingleton, "cannot split a single-point region");
    }
    Region lower = region;
    Region upper = region;
    const Dimension& d = region.dims[best];
    const auto lower_size = static_cast<int64_t>((d.cardinality() + 1) / 2);
    lower.dims[best].hi = d.lo + lower_size - 1;
    upper.dims[best].lo = d.lo + lower_size;
    return {std::move(lower), std::move(upper)};
}

std::string_view search_status_name(SearchStatus s) {
    switch (s) {
    case SearchStatus::Optimal: return "optimal";
    case SearchStatus::BudgetExceeded: return "budget-exceeded";
    case SearchStatus::Fault: return "fault";
    }
    return "?";
}

namespace {

struct Evaluation {
    Region region;
    Cycles upper = 0;
    bool exact = false;
    bool may_fault = false;
    bool over_budget = false;
    InputBinding sample;
    std::optional<Cycles> sample_time;
    std::optional<FaultInfo> fault;
    uint64_t abs_evals = 0;
    uint64_t concrete_evals = 0;
};

class Search {
  public:
    Search(const LoadedProgram& prog, const TimingModel& model, const std::string& function, Cycles max_time,
           const SearchOptions& options)
        : staged_(stage(prog, build_cfg(prog, function), model)),
          sim_(prog, model),
          entry_(symbol_address(prog, function)),
          max_time_(max_time),
          options_(options) {
        abs_options_.merge = options.merge;
    }

    SearchResult run(const InputSpace& space) {
        result_.max_time = max_time_;
        if (!absorb(evaluate(Region{space.dims()}))) {
            return finish();
        }
        while (!queue_.empty()) {
            Entry top = queue_.top();
            queue_.pop();
            const Evaluation& e = evals_[top.index];
            if (have_lower_ && e.upper <= lower_ && !e.may_fault) {
                ++result_.regions_pruned;
                if (options_.record_prunes) {
                    result_.prunes.push_back({e.region, e.upper, lower_});
                }
                continue;
            }
            if (e.exact && !e.may_fault) {
                // Every input of the region takes the same path.
                if (e.sample_time != e.upper) {
                    throw SearchError(SearchError::Kind::WitnessMismatch,
                                      "exact region " + e.region.to_string() + " bounded at " +
                                          std::to_string(e.upper) + " but its midpoint takes " +
                                          std::to_string(e.sample_time.value_or(0)));
                }
                continue;
            }
            auto [lo, hi] = split(e.region);
            Evaluation a;
            Evaluation b;
            if (options_.jobs > 1) {
                auto fa = std::async(std::launch::async, [&] { return evaluate(std::move(lo)); });
                b = evaluate(std::move(hi));
                a = fa.get();
            } else {
                a = evaluate(std::move(lo));
                b = evaluate(std::move(hi));
            }
            if (!absorb(std::move(a)) || !absorb(std::move(b))) {
                return finish();
            }
        }
        return finish();
    }

  private:
    struct Entry {
        Cycles upper;
        size_t index;
        // Largest bound first; earlier regions first among equals.
        bool operator<(const Entry& o) const {
            return upper != o.upper ? upper < o.upper : index > o.index;
        }
    };

    Evaluation evaluate(Region region) const {
        Evaluation e;
        e.sample = region.midpoint();
        const RunResult r = sim_.run(entry_, e.sample, options_.step_budget);
        e.concrete_evals = 1;
        if (r.status == RunStatus::Fault) {
            e.fault = r.fault;
            e.region = std::move(region);
            return e;
        }
        if (r.status == RunStatus::StepBudgetExceeded || r.total_cycles >= max_time_) {
            e.over_budget = true;
            e.region = std::move(region);
            return e;
        }
        e.sample_time = r.total_cycles;
        if (region.is_singleton()) {
            e.upper = r.total_cycles;
            e.exact = true;
        } else {
            const AbsResult a = abs_execute(staged_, region.abstract_binding(), max_time_, abs_options_);
            e.abs_evals = 1;
            if (a.status == AbsStatus::BudgetExceeded) {
                // Only a concrete run proves the budget is exceeded; an
                // abstract cut may come from imprecision, so keep splitting.
                e.upper = max_time_;
            } else {
                e.upper = a.wcet_upper;
                e.exact = a.exact;
            }
            e.may_fault = a.may_fault;
        }
        e.region = std::move(region);
        return e;
    }

    // Records an evaluation; false once the search must stop.
    bool absorb(Evaluation e) {
        result_.abs_evals += e.abs_evals;
        result_.concrete_evals += e.concrete_evals;
        if (e.fault) {
            result_.status = SearchStatus::Fault;
            result_.fault = e.fault;
            result_.fault_input = e.sample;
            return false;
        }
        if (e.over_budget) {
            result_.status = SearchStatus::BudgetExceeded;
            return false;
        }
        if (!have_lower_ || *e.sample_time > lower_) {
            have_lower_ = true;
            lower_ = *e.sample_time;
            witness_ = e.sample;
        }
        queue_.push(Entry{e.upper, evals_.size()});
        evals_.push_back(std::move(e));
        return true;
    }

    SearchResult finish() {
        switch (result_.status) {
        case SearchStatus::Optimal:
            result_.wcet = lower_;
            result_.witness = witness_;
            break;
        case SearchStatus::BudgetExceeded:
            result_.wcet = max_time_;
            break;
        case SearchStatus::Fault:
            result_.wcet = 0;
            break;
        }
        return std::move(result_);
    }

    StagedInterpreter staged_;
    Simulator sim_;
    Address entry_;
    Cycles max_time_;
    SearchOptions options_;
    AbsOptions abs_options_;
    std::priority_queue<Entry> queue_;
    std::vector<Evaluation> evals_;
    bool have_lower_ = false;
    Cycles lower_ = 0;
    InputBinding witness_;
    SearchResult result_;
};

} // namespace

SearchResult optimal_wcet(const LoadedProgram& prog, const TimingModel& model, const std::string& function,
                          const InputSpace& space, Cycles max_time, const SearchOptions& options) {
    if (max_time == 0) {
        throw std::invalid_argument("max_time must be positive");
    }
    Search search(prog, model, function, max_time, options);
    return search.run(space);
}

} // namespace kta
