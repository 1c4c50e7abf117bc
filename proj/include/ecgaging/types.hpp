#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ecgaging/common.hpp"

namespace ecgaging {

inline constexpr int kNumAgeGroups = 15;

// Age bins: index 0 is 18-19, indices 1..13 are consecutive 5-year bins from
// 20, index 14 is 85-92.
struct AgeGroup {
    int index = 0;
    int lo = 18;
    int hi = 19;

    std::string label() const { return std::to_string(lo) + "-" + std::to_string(hi); }

    static AgeGroup from_index(int index);
    // Total for ages 18..92, empty outside.
    static std::optional<AgeGroup> from_age(int years);

    bool operator==(const AgeGroup& o) const { return index == o.index; }
};

struct EcgRecord {
    std::string record_id;
    std::vector<double> samples;  // millivolts
    int fs = 0;                   // Hz
    std::string lead;
    std::optional<AgeGroup> age_group;

    double duration_s() const { return static_cast<double>(samples.size()) / fs; }
};

struct Cohort {
    std::vector<EcgRecord> records;
    std::string manifest_path;
    std::size_t excluded_missing_age = 0;
};

// Per-beat landmarks as sample indices. Only the R index is guaranteed;
// everything else may be absent for a given beat.
struct Beat {
    std::optional<std::size_t> p_on, p_peak, p_off;
    std::optional<std::size_t> q;
    std::size_t r = 0;
    std::optional<std::size_t> s;
    std::optional<std::size_t> t_peak, t_off;
};

struct FiducialSet {
    std::vector<Beat> beats;

    // Enforces p_on <= p_peak <= p_off < q < r < s < t_peak <= t_off per beat
    // by clearing any landmark that breaks the chain.
    void enforce_ordering();
    std::string to_json() const;
    static FiducialSet from_json(const std::string& text);
};

}  // namespace ecgaging
