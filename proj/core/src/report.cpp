#include "segreg/report.hpp"
#include "segreg/common.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace segreg {

using nlohmann::json;

const CheckRecord* VerificationReport::find(const std::string& name) const {
    for (const auto& r : records)
        if (r.name == name) return &r;
    return nullptr;
}

bool VerificationReport::all_pass() const {
    for (const auto& r : records)
        if (r.status == CheckStatus::Fail) return false;
    return true;
}

namespace {

CheckStatus status_from_string(const std::string& s) {
    if (s == "PASS") return CheckStatus::Pass;
    if (s == "FAIL") return CheckStatus::Fail;
    if (s == "INSUFFICIENT_DATA") return CheckStatus::Insufficient;
    return CheckStatus::NotApplicable;
}

} // namespace

std::string to_json(const VerificationReport& rep) {
    json j;
    j["run_name"] = rep.run_name;
    j["seed"] = rep.seed;
    j["config_hash"] = rep.config_hash;
    json recs = json::array();
    for (const auto& r : rep.records) {
        json jr;
        jr["name"] = r.name;
        jr["status"] = to_string(r.status);
        jr["measured"] = r.measured;
        jr["tolerance"] = r.tolerance;
        jr["note"] = r.note;
        json locs = json::array();
        for (const auto& p : r.worst_locations) locs.push_back({p[0], p[1]});
        jr["worst_locations"] = locs;
        recs.push_back(jr);
    }
    j["records"] = recs;
    return j.dump(2) + "\n";
}

VerificationReport report_from_json(const std::string& text) {
    const json j = json::parse(text);
    VerificationReport rep;
    rep.run_name = j.value("run_name", "");
    rep.seed = j.value("seed", std::uint64_t{0});
    rep.config_hash = j.value("config_hash", "");
    for (const auto& jr : j.at("records")) {
        CheckRecord r;
        r.name = jr.value("name", "");
        r.status = status_from_string(jr.value("status", ""));
        r.measured = jr.value("measured", 0.0);
        r.tolerance = jr.value("tolerance", 0.0);
        r.note = jr.value("note", "");
        if (jr.contains("worst_locations"))
            for (const auto& p : jr["worst_locations"])
                r.worst_locations.push_back({p[0].get<double>(), p[1].get<double>()});
        rep.records.push_back(std::move(r));
    }
    return rep;
}

void write_report(const std::string& path, const VerificationReport& rep) {
    std::ofstream os(path);
    require(os.good(), "write_report: cannot open " + path);
    os << to_json(rep);
}

VerificationReport read_report(const std::string& path) {
    std::ifstream is(path);
    require(is.good(), "read_report: cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return report_from_json(ss.str());
}

} // namespace segreg
