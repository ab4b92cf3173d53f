#include "kta/report.hpp"

#include <sstream>
#include <stdexcept>

#include "util.hpp"

namespace kta {

namespace {

View view_for(const Location& loc, const InputSpace& space) {
    for (const auto& d : space.dims()) {
        if (d.location == loc) {
            return d.view;
        }
    }
    return View::Signed;
}

View parse_view(const std::string& s) {
    if (s == "signed") {
        return View::Signed;
    }
    if (s == "unsigned") {
        return View::Unsigned;
    }
    throw std::invalid_argument("unknown view '" + s + "'");
}

std::string binding_text(const InputBinding& binding, const InputSpace& space) {
    std::string out;
    for (const auto& [loc, w] : binding) {
        if (!out.empty()) {
            out += ' ';
        }
        out += loc.to_string() + "=" + std::to_string(word_value(w, view_for(loc, space)));
    }
    return out.empty() ? "-" : out;
}

std::optional<FaultKind> fault_kind_from_name(std::string_view name) {
    for (auto k : {FaultKind::UnsupportedInstruction, FaultKind::Overflow, FaultKind::UnmappedAddress,
                   FaultKind::MisalignedAccess, FaultKind::DivideByZero, FaultKind::BranchInDelaySlot}) {
        if (fault_kind_name(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

} // namespace

Json binding_to_json(const InputBinding& binding, const InputSpace& space) {
    Json j = Json::object();
    for (const auto& [loc, w] : binding) {
        j[loc.to_string()] = word_value(w, view_for(loc, space));
    }
    return j;
}

InputBinding binding_from_json(const Json& j) {
    InputBinding b;
    for (const auto& [key, value] : j.items()) {
        b.emplace_back(Location::parse(key), value_word(value.get<int64_t>()));
    }
    return b;
}

Json to_json(const InputSpace& space) {
    Json dims = Json::array();
    for (const auto& d : space.dims()) {
        dims.push_back({{"loc", d.location.to_string()}, {"lo", d.lo}, {"hi", d.hi}, {"view", view_name(d.view)}});
    }
    return dims;
}

InputSpace input_space_from_json(const Json& j) {
    std::vector<Dimension> dims;
    for (const auto& d : j) {
        dims.push_back(Dimension{Location::parse(d.at("loc").get<std::string>()), d.at("lo").get<int64_t>(),
                                 d.at("hi").get<int64_t>(), parse_view(d.at("view").get<std::string>())});
    }
    return InputSpace(std::move(dims));
}

Json to_json(const FineGrainedReport& report) {
    Json pairs = Json::array();
    for (const auto& p : report.pairs) {
        pairs.push_back({{"from", p.from},
                         {"to", p.to},
                         {"wcet", p.wcet},
                         {"bcet", p.bcet},
                         {"wcet_witness", binding_to_json(p.wcet_witness, report.space)},
                         {"bcet_witness", binding_to_json(p.bcet_witness, report.space)},
                         {"samples", p.samples}});
    }
    return {{"function", report.function},
            {"space", to_json(report.space)},
            {"runs", report.runs},
            {"pairs", pairs},
            {"total",
             {{"wcet", report.total.wcet},
              {"bcet", report.total.bcet},
              {"witnesses",
               {{"wcet", binding_to_json(report.total.wcet_witness, report.space)},
                {"bcet", binding_to_json(report.total.bcet_witness, report.space)}}}}}};
}

FineGrainedReport fine_grained_report_from_json(const Json& j) {
    FineGrainedReport r;
    r.function = j.at("function").get<std::string>();
    r.space = input_space_from_json(j.at("space"));
    r.runs = j.at("runs").get<uint64_t>();
    for (const auto& p : j.at("pairs")) {
        r.pairs.push_back(PairReport{p.at("from").get<std::string>(), p.at("to").get<std::string>(),
                                     p.at("wcet").get<Cycles>(), p.at("bcet").get<Cycles>(),
                                     binding_from_json(p.at("wcet_witness")), binding_from_json(p.at("bcet_witness")),
                                     p.at("samples").get<uint64_t>()});
    }
    const Json& t = j.at("total");
    r.total = TotalReport{t.at("wcet").get<Cycles>(), t.at("bcet").get<Cycles>(),
                          binding_from_json(t.at("witnesses").at("wcet")),
                          binding_from_json(t.at("witnesses").at("bcet"))};
    return r;
}

Json to_json(const SearchResult& result, const InputSpace& space) {
    Json j = {{"status", search_status_name(result.status)},
              {"wcet", result.wcet},
              {"witness", binding_to_json(result.witness, space)},
              {"abs_evals", result.abs_evals},
              {"concrete_evals", result.concrete_evals},
              {"regions_pruned", result.regions_pruned},
              {"max_time", result.max_time}};
    if (result.fault) {
        j["fault"] = {{"kind", fault_kind_name(result.fault->kind)},
                      {"pc", hex32(result.fault->pc)},
                      {"message", result.fault->message},
                      {"input", binding_to_json(result.fault_input, space)}};
    }
    return j;
}

SearchResult search_result_from_json(const Json& j) {
    SearchResult r;
    const auto status = j.at("status").get<std::string>();
    if (status == "optimal") {
        r.status = SearchStatus::Optimal;
    } else if (status == "budget-exceeded") {
        r.status = SearchStatus::BudgetExceeded;
    } else if (status == "fault") {
        r.status = SearchStatus::Fault;
    } else {
        throw std::invalid_argument("unknown search status '" + status + "'");
    }
    r.wcet = j.at("wcet").get<Cycles>();
    r.witness = binding_from_json(j.at("witness"));
    r.abs_evals = j.at("abs_evals").get<uint64_t>();
    r.concrete_evals = j.at("concrete_evals").get<uint64_t>();
    r.regions_pruned = j.at("regions_pruned").get<uint64_t>();
    r.max_time = j.at("max_time").get<Cycles>();
    if (j.contains("fault")) {
        const Json& f = j.at("fault");
        const auto kind = fault_kind_from_name(f.at("kind").get<std::string>());
        if (!kind) {
            throw std::invalid_argument("unknown fault kind");
        }
        r.fault = FaultInfo{*kind, static_cast<Address>(std::stoul(f.at("pc").get<std::string>(), nullptr, 16)),
                            f.at("message").get<std::string>()};
        r.fault_input = binding_from_json(f.at("input"));
    }
    return r;
}

std::string to_text(const FineGrainedReport& report) {
    std::ostringstream out;
    out << "function " << report.function << "\n";
    out << "runs " << report.runs << "\n";
    out << "total wcet " << report.total.wcet << " at " << binding_text(report.total.wcet_witness, report.space)
        << "\n";
    out << "total bcet " << report.total.bcet << " at " << binding_text(report.total.bcet_witness, report.space)
        << "\n";
    for (const auto& p : report.pairs) {
        out << p.from << " -> " << p.to << " wcet " << p.wcet << " at " << binding_text(p.wcet_witness, report.space)
            << "\n";
        out << p.from << " -> " << p.to << " bcet " << p.bcet << " at " << binding_text(p.bcet_witness, report.space)
            << "\n";
        out << p.from << " -> " << p.to << " samples " << p.samples << "\n";
    }
    return out.str();
}

std::string to_text(const SearchResult& result, const InputSpace& space) {
    std::ostringstream out;
    out << "status " << search_status_name(result.status) << "\n";
    out << "wcet " << result.wcet << "\n";
    if (result.status == SearchStatus::Optimal) {
        out << "witness " << binding_text(result.witness, space) << "\n";
    }
    if (result.fault) {
        out << "fault " << fault_kind_name(result.fault->kind) << " at " << hex32(result.fault->pc) << " for "
            << binding_text(result.fault_input, space) << "\n";
    }
    out << "abs_evals " << result.abs_evals << "\n";
    out << "concrete_evals " << result.concrete_evals << "\n";
    out << "regions_pruned " << result.regions_pruned << "\n";
    out << "max_time " << result.max_time << "\n";
    return out.str();
}

} // namespace kta
