#include "ecgaging/types.hpp"

#include <json.hpp>

namespace ecgaging {

AgeGroup AgeGroup::from_index(int index) {
    if (index < 0 || index >= kNumAgeGroups) {
        throw DataError("age group index out of range: " + std::to_string(index));
    }
    AgeGroup g;
    g.index = index;
    if (index == 0) {
        g.lo = 18;
        g.hi = 19;
    } else if (index == 14) {
        g.lo = 85;
        g.hi = 92;
    } else {
        g.lo = 20 + (index - 1) * 5;
        g.hi = g.lo + 4;
    }
    return g;
}

std::optional<AgeGroup> AgeGroup::from_age(int years) {
    if (years < 18 || years > 92) return std::nullopt;
    if (years <= 19) return from_index(0);
    if (years >= 85) return from_index(14);
    return from_index(1 + (years - 20) / 5);
}

void FiducialSet::enforce_ordering() {
    for (auto& b : beats) {
        // clear from the outside in: anything at or past R on the left side,
        // anything at or before R on the right side, then pairwise order
        auto bad_left = [&](const std::optional<std::size_t>& v) {
            return v && *v >= b.r;
        };
        if (bad_left(b.q)) b.q.reset();
        if (bad_left(b.p_off) || (b.q && b.p_off && *b.p_off >= *b.q)) b.p_off.reset();
        if (b.p_peak && ((b.p_off && *b.p_peak > *b.p_off) || *b.p_peak >= b.r ||
                         (b.q && *b.p_peak >= *b.q)))
            b.p_peak.reset();
        if (b.p_on && ((b.p_peak && *b.p_on > *b.p_peak) || (b.p_off && *b.p_on > *b.p_off) ||
                       *b.p_on >= b.r))
            b.p_on.reset();
        if (!b.p_peak) {
            b.p_on.reset();
            b.p_off.reset();
        }
        if (b.s && *b.s <= b.r) b.s.reset();
        if (b.t_peak && ((b.s && *b.t_peak <= *b.s) || *b.t_peak <= b.r)) b.t_peak.reset();
        if (b.t_off && (!b.t_peak || *b.t_off < *b.t_peak)) b.t_off.reset();
    }
}

namespace {

nlohmann::json opt_array(const std::vector<Beat>& beats,
                         std::optional<std::size_t> Beat::*member) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : beats) {
        const auto& v = b.*member;
        if (v)
            arr.push_back(*v);
        else
            arr.push_back(nullptr);
    }
    return arr;
}

void read_opt_array(const nlohmann::json& arr, std::vector<Beat>& beats,
                    std::optional<std::size_t> Beat::*member) {
    for (std::size_t i = 0; i < beats.size(); ++i) {
        if (!arr[i].is_null()) beats[i].*member = arr[i].get<std::size_t>();
    }
}

}  // namespace

std::string FiducialSet::to_json() const {
    nlohmann::json j;
    nlohmann::json r = nlohmann::json::array();
    for (const auto& b : beats) r.push_back(b.r);
    j["r"] = r;
    j["p_on"] = opt_array(beats, &Beat::p_on);
    j["p_peak"] = opt_array(beats, &Beat::p_peak);
    j["p_off"] = opt_array(beats, &Beat::p_off);
    j["q"] = opt_array(beats, &Beat::q);
    j["s"] = opt_array(beats, &Beat::s);
    j["t_peak"] = opt_array(beats, &Beat::t_peak);
    j["t_off"] = opt_array(beats, &Beat::t_off);
    return j.dump();
}

FiducialSet FiducialSet::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    FiducialSet fs;
    const auto& r = j.at("r");
    fs.beats.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) fs.beats[i].r = r[i].get<std::size_t>();
    read_opt_array(j.at("p_on"), fs.beats, &Beat::p_on);
    read_opt_array(j.at("p_peak"), fs.beats, &Beat::p_peak);
    read_opt_array(j.at("p_off"), fs.beats, &Beat::p_off);
    read_opt_array(j.at("q"), fs.beats, &Beat::q);
    read_opt_array(j.at("s"), fs.beats, &Beat::s);
    read_opt_array(j.at("t_peak"), fs.beats, &Beat::t_peak);
    read_opt_array(j.at("t_off"), fs.beats, &Beat::t_off);
    return fs;
}

}  // namespace ecgaging
