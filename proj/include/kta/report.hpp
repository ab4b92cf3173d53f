#pragma once

#include <string>

#include "json.hpp"
#include "kta/exhaustive.hpp"
#include "kta/search.hpp"

namespace kta {

using Json = nlohmann::ordered_json;

// Bindings serialize as {"a0": 5, "mem:0x00420000": -1}; values use the view
// of the matching dimension of `space`, signed where there is none.
Json binding_to_json(const InputBinding& binding, const InputSpace& space = {});
InputBinding binding_from_json(const Json& j);

Json to_json(const InputSpace& space);
InputSpace input_space_from_json(const Json& j);

Json to_json(const FineGrainedReport& report);
FineGrainedReport fine_grained_report_from_json(const Json& j);

Json to_json(const SearchResult& result, const InputSpace& space = {});
SearchResult search_result_from_json(const Json& j);

std::string to_text(const FineGrainedReport& report);
std::string to_text(const SearchResult& result, const InputSpace& space = {});

} // namespace kta
