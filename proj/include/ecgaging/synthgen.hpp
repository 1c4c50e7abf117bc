#pragma once

#include <array>
#include <map>
#include <utility>

#include "ecgaging/types.hpp"

namespace ecgaging::synthgen {

enum class RrModel { white, pink, alternating };

RrModel parse_rr_model(const std::string& name);
std::string rr_model_name(RrModel m);

struct WaveSpec {
    double amp_mv = 0.0;
    double width_ms = 10.0;   // Gaussian sigma
    double offset_ms = 0.0;   // center relative to R
};

struct SynthParams {
    double mean_hr = 70.0;          // bpm
    double sdnn_target_ms = 40.0;
    double respiration_hz = 0.25;
    double respiration_depth = 0.10;  // fraction of R amplitude
    WaveSpec p{0.15, 25.0, -140.0};
    WaveSpec q{-0.10, 10.0, -35.0};
    WaveSpec r{1.00, 12.0, 0.0};
    WaveSpec s{-0.20, 10.0, 30.0};
    WaveSpec t{0.30, 60.0, 220.0};
    double duration_s = 60.0;
    int fs = 250;
    RrModel rr_model = RrModel::white;
    double noise_mv = 0.0;  // additive white Gaussian noise, stddev
    std::uint64_t seed = 1;

    void validate() const;
};

struct GroundTruth {
    std::vector<std::size_t> r_times;  // sample indices
    FiducialSet fiducials;
    std::vector<double> rr_ms;
    double breathing_rate_bpm = 0.0;
};

// Deterministic per seed. The waveform is a per-beat sum of Gaussian wave
// templates; the RR sequence follows the chosen correlation model scaled to
// sdnn_target; the R amplitude is modulated sinusoidally at respiration_hz.
std::pair<EcgRecord, GroundTruth> synth_record(const SynthParams& params);

// Per-age-group parameter table. The defaults encode decreasing breathing
// rate and breathing-signal depth, increasing P amplitude, and decreasing
// RR variability across groups 0..14.
struct TrendSpec {
    std::array<SynthParams, kNumAgeGroups> by_group;

    static TrendSpec defaults();
    static TrendSpec load_csv(const std::string& path);
    void save_csv(const std::string& path) const;
};

struct SynthCohort {
    Cohort cohort;
    std::map<std::string, GroundTruth> truth;  // by record_id
};

// n_per_group records per age group; per-record parameters are the group's
// entry with multiplicative +-5% uniform jitter. Deterministic per seed.
SynthCohort synth_cohort(const TrendSpec& spec, int n_per_group, std::uint64_t seed);

}  // namespace ecgaging::synthgen
