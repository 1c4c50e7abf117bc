#include "ecgaging/beatdetect.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "ecgaging/dsp.hpp"

namespace ecgaging::beatdetect {

namespace {

std::size_t ms_to_samples(double ms, int fs) {
    return static_cast<std::size_t>(std::max(1L, std::lround(ms * fs / 1000.0)));
}

std::vector<double> moving_window_integral(std::span<const double> x, std::size_t win) {
    std::vector<double> out(x.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += x[i];
        if (i >= win) acc -= x[i - win];
        out[i] = acc / static_cast<double>(win);
    }
    return out;
}

}  // namespace

std::vector<std::size_t> detect_rpeaks(const EcgRecord& record, const DetectorConfig& cfg) {
    const auto& x = record.samples;
    const int fs = record.fs;
    if (record.duration_s() < cfg.min_duration_s) {
        throw NumericalError("detect_rpeaks: record shorter than 3 s");
    }
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    if (*mx - *mn <= 0.0) throw NumericalError("flat signal");

    // band-pass
    auto bp = dsp::butter_highpass(cfg.band_lo_hz, fs).apply(x);
    bp = dsp::butter_lowpass(cfg.band_hi_hz, fs).apply(bp);

    // derivative, square
    std::vector<double> sq(bp.size(), 0.0);
    for (std::size_t i = 4; i < bp.size(); ++i) {
        const double d = (2.0 * bp[i] + bp[i - 1] - bp[i - 3] - 2.0 * bp[i - 4]) / 8.0;
        sq[i] = d * d;
    }

    const std::size_t mwi_len = ms_to_samples(cfg.integration_ms, fs);
    const auto mwi = moving_window_integral(sq, mwi_len);

    // adaptive thresholding over MWI local maxima
    const std::size_t warmup = std::min<std::size_t>(mwi.size(), static_cast<std::size_t>(2 * fs));
    double spki = 0.0, npki = 0.0;
    for (std::size_t i = 0; i < warmup; ++i) {
        spki = std::max(spki, mwi[i]);
        npki += mwi[i];
    }
    spki *= 0.5;
    npki = 0.5 * (npki / static_cast<double>(warmup));

    const std::size_t refractory = ms_to_samples(cfg.refractory_ms, fs);
    struct Cand {
        std::size_t idx;
        double val;
    };
    std::vector<std::size_t> qrs_mwi;      // accepted QRS positions (MWI peak index)
    std::vector<Cand> pending;             // sub-threshold peaks for search-back
    std::deque<double> recent_rr;
    double thr1 = npki + 0.25 * (spki - npki);

    auto avg_rr = [&]() {
        if (recent_rr.empty()) return 0.0;
        double s = 0.0;
        for (double v : recent_rr) s += v;
        return s / static_cast<double>(recent_rr.size());
    };
    auto accept = [&](std::size_t idx, double val, bool searchback) {
        if (!qrs_mwi.empty()) {
            const double rr = static_cast<double>(idx - qrs_mwi.back());
            recent_rr.push_back(rr);
            if (recent_rr.size() > 8) recent_rr.pop_front();
        }
        qrs_mwi.push_back(idx);
        if (searchback)
            spki = 0.25 * val + 0.75 * spki;
        else
            spki = 0.125 * val + 0.875 * spki;
        thr1 = npki + 0.25 * (spki - npki);
    };

    for (std::size_t i = 1; i + 1 < mwi.size(); ++i) {
        if (!(mwi[i] > mwi[i - 1] && mwi[i] >= mwi[i + 1])) continue;  // local max
        const double peak = mwi[i];
        const bool in_refractory = !qrs_mwi.empty() && i - qrs_mwi.back() < refractory;
        if (peak > thr1 && !in_refractory) {
            accept(i, peak, false);
            pending.clear();
        } else {
            if (!in_refractory) pending.push_back({i, peak});
            npki = 0.125 * peak + 0.875 * npki;
            thr1 = npki + 0.25 * (spki - npki);
        }
        // search-back when the expected beat is overdue
        const double rr_avg = avg_rr();
        if (rr_avg > 0.0 && !qrs_mwi.empty() &&
            static_cast<double>(i - qrs_mwi.back()) > cfg.searchback_factor * rr_avg) {
            const double thr2 = 0.5 * thr1;
            Cand best{0, -1.0};
            for (const auto& c : pending) {
                if (c.idx > qrs_mwi.back() + refractory && c.val >= thr2 && c.val > best.val) {
                    best = c;
                }
            }
            if (best.val > 0.0) {
                accept(best.idx, best.val, true);
                pending.clear();
            }
        }
    }

    // refine: squared band-passed peak inside the MWI window, then the raw
    // local maximum within +-refine_ms
    const std::size_t refine = ms_to_samples(cfg.refine_ms, fs);
    std::vector<std::size_t> peaks;
    for (std::size_t m : qrs_mwi) {
        const std::size_t lo_sq = (m >= mwi_len) ? m - mwi_len : 0;
        std::size_t approx = lo_sq;
        for (std::size_t k = lo_sq; k <= m && k < sq.size(); ++k) {
            if (sq[k] > sq[approx]) approx = k;
        }
        const std::size_t lo = (approx >= refine) ? approx - refine : 0;
        const std::size_t hi = std::min(x.size() - 1, approx + refine);
        std::size_t best = lo;
        for (std::size_t k = lo; k <= hi; ++k) {
            if (x[k] > x[best]) best = k;
        }
        peaks.push_back(best);
    }

    std::sort(peaks.begin(), peaks.end());
    // dedupe refinements that converged to the same R, keep first of a cluster
    std::vector<std::size_t> out;
    for (std::size_t p : peaks) {
        if (!out.empty() && p - out.back() < refractory) continue;
        out.push_back(p);
    }
    if (out.size() < 2) throw NumericalError("detect_rpeaks: fewer than 2 peaks found");
    return out;
}

namespace {

struct Window {
    long lo = 0, hi = -1;  // inclusive; empty when hi < lo
    bool empty() const { return hi < lo; }
};

// Interior extremum of the window, sign = +1 for maxima, -1 for minima.
// Returns nullopt when the extremum sits on the window edge (monotone data,
// i.e. nothing to find) or its prominence over the window median is small.
std::optional<std::size_t> interior_extremum(std::span<const double> x, Window w, int sign,
                                             double min_prominence, double* prominence_out) {
    if (w.empty() || w.hi - w.lo < 2) return std::nullopt;
    long best = w.lo;
    for (long i = w.lo; i <= w.hi; ++i) {
        if (sign * x[static_cast<std::size_t>(i)] > sign * x[static_cast<std::size_t>(best)]) {
            best = i;
        }
    }
    if (best == w.lo || best == w.hi) return std::nullopt;
    std::vector<double> win(x.begin() + w.lo, x.begin() + w.hi + 1);
    const double base = dsp::median(std::move(win));
    const double prom = sign * (x[static_cast<std::size_t>(best)] - base);
    if (prominence_out) *prominence_out = prom;
    if (prom < min_prominence) return std::nullopt;
    return static_cast<std::size_t>(best);
}

// Walk outward from the peak on the smoothed derivative until it falls below
// threshold_frac of the wave's own peak derivative, or until the derivative
// magnitude turns back up (transition into the neighbouring wave).
std::optional<std::size_t> wave_bound(std::span<const double> sderiv, std::size_t peak,
                                      Window search, int direction, double threshold_frac) {
    if (search.empty()) return std::nullopt;
    double dmax = 0.0;
    if (direction < 0) {
        for (long i = search.lo; i <= static_cast<long>(peak); ++i) {
            dmax = std::max(dmax, std::abs(sderiv[static_cast<std::size_t>(i)]));
        }
    } else {
        for (long i = static_cast<long>(peak); i <= search.hi; ++i) {
            dmax = std::max(dmax, std::abs(sderiv[static_cast<std::size_t>(i)]));
        }
    }
    if (dmax <= 0.0) return std::nullopt;
    const double thr = threshold_frac * dmax;
    long i = static_cast<long>(peak);
    double prev = std::abs(sderiv[peak]);
    bool past_slope_peak = false;
    while (true) {
        const long next = i + direction;
        if (next < search.lo || next > search.hi) return std::nullopt;
        const double cur = std::abs(sderiv[static_cast<std::size_t>(next)]);
        if (cur < thr) return static_cast<std::size_t>(next);
        if (past_slope_peak && cur > prev) return static_cast<std::size_t>(i);
        if (cur < prev) past_slope_peak = true;
        prev = cur;
        i = next;
    }
}

Beat delineate_one(std::span<const double> x, std::span<const double> sderiv, int fs,
                   std::size_t r, long prev_r, long next_bound,
                   const DelineationConfig& cfg) {
    Beat beat;
    beat.r = r;
    const long n = static_cast<long>(x.size());
    const long ri = static_cast<long>(r);
    auto ms = [fs](double v) { return std::lround(v * fs / 1000.0); };

    std::vector<double> rwin(x.begin() + std::max(0L, ri - ms(cfg.p_from_ms)),
                             x.begin() + std::min(n, ri + ms(cfg.t_to_ms)));
    const double beat_base = rwin.empty() ? 0.0 : dsp::median(std::move(rwin));
    const double r_amp = std::abs(x[r] - beat_base);
    const double min_prom = cfg.prominence_frac * r_amp;

    // Q and S: minima in fixed windows around R
    Window qw{std::max({0L, ri - ms(cfg.q_pre_ms), prev_r + 1}), ri - 1};
    beat.q = interior_extremum(x, qw, -1, min_prom, nullptr);
    Window sw{ri + 1, std::min(n - 1, ri + ms(cfg.s_post_ms))};
    if (next_bound >= 0) sw.hi = std::min(sw.hi, next_bound - 1);
    beat.s = interior_extremum(x, sw, -1, min_prom, nullptr);

    // P: window before R, clipped to the previous beat
    Window pw{std::max({0L, ri - ms(cfg.p_from_ms), prev_r + 1}), ri - ms(cfg.p_to_ms)};
    beat.p_peak = interior_extremum(x, pw, +1, min_prom, nullptr);
    if (beat.p_peak) {
        beat.p_on = wave_bound(sderiv, *beat.p_peak, pw, -1, cfg.deriv_threshold);
        beat.p_off = wave_bound(sderiv, *beat.p_peak, pw, +1, cfg.deriv_threshold);
    }

    // T: window after R, clipped to the current RR
    Window tw{ri + ms(cfg.t_from_ms), std::min(n - 1, ri + ms(cfg.t_to_ms))};
    if (next_bound >= 0) tw.hi = std::min(tw.hi, next_bound - ms(cfg.t_from_ms));
    beat.t_peak = interior_extremum(x, tw, +1, min_prom, nullptr);
    if (beat.t_peak) {
        beat.t_off = wave_bound(sderiv, *beat.t_peak, tw, +1, cfg.deriv_threshold);
    }
    return beat;
}

std::vector<double> smoothed_derivative(std::span<const double> x, int fs, double smooth_ms) {
    const std::size_t w = ms_to_samples(smooth_ms, fs) | 1u;
    std::vector<double> kernel(w, 1.0 / static_cast<double>(w));
    const auto smooth = dsp::convolve_same(x, kernel);
    std::vector<double> d(x.size(), 0.0);
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        d[i] = 0.5 * (smooth[i + 1] - smooth[i - 1]) * fs;
    }
    return d;
}

}  // namespace

FiducialSet delineate_fiducials(const EcgRecord& record, const std::vector<std::size_t>& rpeaks,
                                const DelineationConfig& cfg) {
    if (rpeaks.size() < 2) throw NumericalError("delineate_fiducials: need >= 2 R-peaks");
    const auto sderiv = smoothed_derivative(record.samples, record.fs, cfg.smooth_ms);

    FiducialSet out;
    for (std::size_t b = 0; b < rpeaks.size(); ++b) {
        const long prev_r = (b == 0) ? -1 : static_cast<long>(rpeaks[b - 1]);
        const long next_r = (b + 1 < rpeaks.size()) ? static_cast<long>(rpeaks[b + 1]) : -1;
        out.beats.push_back(delineate_one(record.samples, sderiv, record.fs, rpeaks[b], prev_r,
                                          next_r, cfg));
    }
    out.enforce_ordering();
    return out;
}

Beat delineate_single_beat(std::span<const double> signal, int fs, std::size_t r_idx,
                           double rr_next_ms, const DelineationConfig& cfg) {
    const auto sderiv = smoothed_derivative(signal, fs, cfg.smooth_ms);
    const long next_bound =
        rr_next_ms > 0.0
            ? static_cast<long>(r_idx) + std::lround(rr_next_ms * fs / 1000.0)
            : -1;
    Beat beat = delineate_one(signal, sderiv, fs, r_idx, -1, next_bound, cfg);
    FiducialSet tmp;
    tmp.beats.push_back(beat);
    tmp.enforce_ordering();
    return tmp.beats.front();
}

std::vector<std::vector<double>> segment_beats(const EcgRecord& record,
                                               const std::vector<std::size_t>& rpeaks,
                                               const BeatWindow& window) {
    const long pre = std::lround(window.pre_ms * record.fs / 1000.0);
    const long post = std::lround(window.post_ms * record.fs / 1000.0);
    const long n = static_cast<long>(record.samples.size());
    std::vector<std::vector<double>> rows;
    for (std::size_t r : rpeaks) {
        const long lo = static_cast<long>(r) - pre;
        const long hi = static_cast<long>(r) + post;
        if (lo < 0 || hi >= n) continue;
        rows.emplace_back(record.samples.begin() + lo, record.samples.begin() + hi + 1);
    }
    if (rows.empty()) throw NumericalError("segment_beats: no beat fits the window");
    return rows;
}

MatchScore match_rpeaks(const std::vector<std::size_t>& detected,
                        const std::vector<std::size_t>& reference, std::size_t tol_samples) {
    MatchScore score;
    std::vector<bool> used(reference.size(), false);
    for (std::size_t d : detected) {
        bool matched = false;
        for (std::size_t j = 0; j < reference.size(); ++j) {
            if (used[j]) continue;
            const std::size_t diff = d > reference[j] ? d - reference[j] : reference[j] - d;
            if (diff <= tol_samples) {
                used[j] = true;
                matched = true;
                break;
            }
        }
        matched ? ++score.tp : ++score.fp;
    }
    for (bool u : used) {
        if (!u) ++score.fn;
    }
    const double denom = 2.0 * score.tp + score.fp + score.fn;
    score.f1 = denom > 0.0 ? 2.0 * score.tp / denom : 0.0;
    return score;
}

}  // namespace ecgaging::beatdetect
