#pragma once

#include "segreg/analysis.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace segreg {

// Structured pass/fail record set for one run. Serialized as JSON with
// alphabetically ordered keys, so identical inputs give identical bytes.
struct VerificationReport {
    std::string run_name;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<CheckRecord> records;

    void add(CheckRecord r) { records.push_back(std::move(r)); }
    const CheckRecord* find(const std::string& name) const;
    // NotApplicable / Insufficient records do not fail the report.
    bool all_pass() const;
};

std::string to_json(const VerificationReport& rep);
VerificationReport report_from_json(const std::string& text);
void write_report(const std::string& path, const VerificationReport& rep);
VerificationReport read_report(const std::string& path);

} // namespace segreg
