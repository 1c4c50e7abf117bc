#pragma once

#include <span>

#include "ecgaging/types.hpp"

namespace ecgaging::beatdetect {

struct DetectorConfig {
    double band_lo_hz = 5.0;
    double band_hi_hz = 15.0;
    double integration_ms = 150.0;
    double refractory_ms = 200.0;
    double refine_ms = 50.0;     // raw-signal local-max refinement half-window
    double searchback_factor = 1.66;
    double min_duration_s = 3.0;
};

// Pan-Tompkins style R-peak detector: band-pass, derivative, squaring,
// moving-window integration, adaptive thresholds with search-back; indices
// refined to the raw-signal local maximum. Output is invariant under
// positive amplitude scaling.
std::vector<std::size_t> detect_rpeaks(const EcgRecord& record,
                                       const DetectorConfig& cfg = {});

struct DelineationConfig {
    double q_pre_ms = 80.0;
    double s_post_ms = 80.0;
    double p_from_ms = 250.0;  // window start before R
    double p_to_ms = 50.0;     // window end before R
    double t_from_ms = 80.0;   // window start after R
    double t_to_ms = 420.0;    // window end after R, clipped to the current RR
    double deriv_threshold = 0.05;   // fraction of the wave's peak derivative
    double prominence_frac = 0.02;   // of the beat's R amplitude
    double smooth_ms = 12.0;
};

// Per-beat Q/S extrema in fixed windows, P/T extrema in RR-clipped windows,
// on/offsets by the derivative-threshold rule. Absent landmarks are data,
// not errors; the ordering invariant holds on every output.
FiducialSet delineate_fiducials(const EcgRecord& record,
                                const std::vector<std::size_t>& rpeaks,
                                const DelineationConfig& cfg = {});

// Delineate one beat in isolation (used for aggregated mean beats).
Beat delineate_single_beat(std::span<const double> signal, int fs, std::size_t r_idx,
                           double rr_next_ms, const DelineationConfig& cfg = {});

struct BeatWindow {
    double pre_ms = 300.0;
    double post_ms = 500.0;
};

// One row per R-peak whose window fits fully inside the record; rows are
// exact slices aligned at R with length pre+post samples + 1.
std::vector<std::vector<double>> segment_beats(const EcgRecord& record,
                                               const std::vector<std::size_t>& rpeaks,
                                               const BeatWindow& window);

struct MatchScore {
    std::size_t tp = 0, fp = 0, fn = 0;
    double f1 = 0.0;
};

// Greedy one-to-one matching of detected peaks to reference peaks within
// +-tol samples.
MatchScore match_rpeaks(const std::vector<std::size_t>& detected,
                        const std::vector<std::size_t>& reference, std::size_t tol_samples);

}  // namespace ecgaging::beatdetect
