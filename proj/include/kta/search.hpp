#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kta/absint.hpp"
#include "kta/exhaustive.hpp"

namespace kta {

class SearchError : public std::logic_error {
  public:
    enum class Kind { CannotSplitSingleton, WitnessMismatch };
    SearchError(Kind kind, const std::string& what) : std::logic_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

// A rectangular sub-space: one sub-range per input dimension.
struct Region {
    std::vector<Dimension> dims;

    uint64_t cardinality() const;
    bool is_singleton() const { return cardinality() == 1; }
    // Per dimension lo + (hi - lo) / 2.
    InputBinding midpoint() const;
    AbstractBinding abstract_binding() const;
    std::string to_string() const;

    bool operator==(const Region&) const = default;
};

// Halves the dimension with the most points (lowest index on ties); the
// lower half gets the extra point.
std::pair<Region, Region> split(const Region& region);

enum class SearchStatus { Optimal, BudgetExceeded, Fault };

std::string_view search_status_name(SearchStatus s);

struct PruneRecord {
    Region region;
    Cycles upper = 0;
    Cycles lower_bound = 0;
};

struct SearchResult {
    SearchStatus status = SearchStatus::Optimal;
    Cycles wcet = 0;
    InputBinding witness;
    uint64_t abs_evals = 0;
    uint64_t concrete_evals = 0;
    uint64_t regions_pruned = 0;
    Cycles max_time = 0;
    // Set when status is Fault.
    std::optional<FaultInfo> fault;
    InputBinding fault_input;
    // Filled when SearchOptions::record_prunes is set.
    std::vector<PruneRecord> prunes;
};

struct SearchOptions {
    uint64_t step_budget = 10'000'000;
    unsigned jobs = 1;
    MergePolicy merge = MergePolicy::None;
    bool record_prunes = false;
};

SearchResult optimal_wcet(const LoadedProgram& prog, const TimingModel& model, const std::string& function,
                          const InputSpace& space, Cycles max_time, const SearchOptions& options = {});

} // namespace kta
