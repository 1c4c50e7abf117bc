#include "ecgaging/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ecgaging/dsp.hpp"

namespace ecgaging::synthgen {

RrModel parse_rr_model(const std::string& name) {
    if (name == "white") return RrModel::white;
    if (name == "pink") return RrModel::pink;
    if (name == "alternating") return RrModel::alternating;
    throw DataError("unknown rr model: " + name);
}

std::string rr_model_name(RrModel m) {
    switch (m) {
        case RrModel::white: return "white";
        case RrModel::pink: return "pink";
        case RrModel::alternating: return "alternating";
    }
    return "white";
}

void SynthParams::validate() const {
    if (mean_hr < 30.0 || mean_hr > 180.0) throw DataError("synth: mean_hr outside [30,180]");
    if (duration_s * mean_hr / 60.0 < 2.0) throw DataError("synth: fewer than 2 beats");
    if (fs <= 0) throw DataError("synth: fs must be positive");
    if (sdnn_target_ms < 0 || respiration_depth < 0 || noise_mv < 0) {
        throw DataError("synth: negative dispersion parameter");
    }
    for (const WaveSpec* w : {&p, &q, &r, &s, &t}) {
        if (!std::isfinite(w->amp_mv) || w->width_ms <= 0) {
            throw DataError("synth: bad wave template");
        }
    }
}

namespace {

// RR deviations are centered to zero mean so cumulative beat times stay on
// the nominal grid; sample SDNN and DFA are unaffected by the shift.
std::vector<double> rr_sequence(const SynthParams& p, std::size_t n_beats, Rng& rng) {
    const double mean_rr = 60000.0 / p.mean_hr;
    const std::size_t n = n_beats - 1;
    std::vector<double> dev(n, 0.0);
    switch (p.rr_model) {
        case RrModel::white:
            for (auto& d : dev) d = rng.normal(0.0, p.sdnn_target_ms);
            break;
        case RrModel::pink: {
            auto x = dsp::pink_noise(std::max<std::size_t>(n, 2), rng);
            for (std::size_t i = 0; i < n; ++i) dev[i] = x[i] * p.sdnn_target_ms;
            break;
        }
        case RrModel::alternating: {
            const double delta = p.sdnn_target_ms;
            for (std::size_t i = 0; i < n; ++i) {
                dev[i] = (i % 2 == 0 ? delta : -delta) + rng.normal(0.0, 0.1 * delta);
            }
            break;
        }
    }
    if (!dev.empty()) {
        const double m = dsp::mean(dev);
        for (auto& d : dev) d -= m;
    }
    std::vector<double> rr(n);
    for (std::size_t i = 0; i < n; ++i) rr[i] = std::max(300.0, mean_rr + dev[i]);
    return rr;
}

std::size_t clamp_index(double t_s, int fs, std::size_t n) {
    long idx = std::lround(t_s * fs);
    idx = std::clamp<long>(idx, 0, static_cast<long>(n) - 1);
    return static_cast<std::size_t>(idx);
}

}  // namespace

std::pair<EcgRecord, GroundTruth> synth_record(const SynthParams& params) {
    params.validate();
    Rng rng(params.seed);

    const double mean_rr_s = 60.0 / params.mean_hr;
    const std::size_t n_samples = static_cast<std::size_t>(std::llround(params.duration_s * params.fs));
    const double t_first = 0.35;
    const std::size_t n_beats =
        static_cast<std::size_t>(std::floor((params.duration_s - 0.4 - t_first) / mean_rr_s)) + 1;

    const auto rr_ms = rr_sequence(params, n_beats, rng);
    std::vector<double> beat_t(n_beats);
    beat_t[0] = t_first;
    for (std::size_t i = 1; i < n_beats; ++i) beat_t[i] = beat_t[i - 1] + rr_ms[i - 1] / 1000.0;

    EcgRecord record;
    record.fs = params.fs;
    record.lead = "II";
    record.samples.assign(n_samples, 0.0);

    GroundTruth truth;
    truth.rr_ms = rr_ms;
    truth.breathing_rate_bpm = params.respiration_hz * 60.0;

    const std::array<const WaveSpec*, 5> waves = {&params.p, &params.q, &params.r, &params.s,
                                                  &params.t};
    for (std::size_t b = 0; b < n_beats; ++b) {
        const double tr = beat_t[b];
        const double r_scale =
            1.0 + params.respiration_depth * std::sin(2.0 * M_PI * params.respiration_hz * tr);
        for (const WaveSpec* w : waves) {
            double amp = w->amp_mv;
            if (w == &params.r) amp *= r_scale;
            if (amp == 0.0) continue;
            const double center = tr + w->offset_ms / 1000.0;
            const double sigma = w->width_ms / 1000.0;
            const long lo = std::max<long>(0, std::lround((center - 4.0 * sigma) * params.fs));
            const long hi = std::min<long>(static_cast<long>(n_samples) - 1,
                                           std::lround((center + 4.0 * sigma) * params.fs));
            for (long i = lo; i <= hi; ++i) {
                const double dt = static_cast<double>(i) / params.fs - center;
                record.samples[static_cast<std::size_t>(i)] +=
                    amp * std::exp(-dt * dt / (2.0 * sigma * sigma));
            }
        }

        Beat beat;
        beat.r = clamp_index(tr, params.fs, n_samples);
        truth.r_times.push_back(beat.r);
        auto mark = [&](const WaveSpec& w, double sigmas) -> std::optional<std::size_t> {
            if (w.amp_mv == 0.0) return std::nullopt;
            return clamp_index(tr + (w.offset_ms + sigmas * w.width_ms) / 1000.0, params.fs,
                               n_samples);
        };
        beat.p_on = mark(params.p, -2.0);
        beat.p_peak = mark(params.p, 0.0);
        beat.p_off = mark(params.p, 2.0);
        beat.q = mark(params.q, 0.0);
        beat.s = mark(params.s, 0.0);
        beat.t_peak = mark(params.t, 0.0);
        beat.t_off = mark(params.t, 2.0);
        truth.fiducials.beats.push_back(beat);
    }

    if (params.noise_mv > 0.0) {
        for (auto& v : record.samples) v += rng.normal(0.0, params.noise_mv);
    }
    return {std::move(record), std::move(truth)};
}

TrendSpec TrendSpec::defaults() {
    TrendSpec spec;
    for (int g = 0; g < kNumAgeGroups; ++g) {
        const double t = static_cast<double>(g) / (kNumAgeGroups - 1);
        SynthParams p;
        p.mean_hr = 70.0;
        p.sdnn_target_ms = 60.0 - 35.0 * t;         // variability declines
        p.respiration_hz = 0.32 - 0.14 * t;         // breathing rate declines
        p.respiration_depth = 0.14 - 0.07 * t;      // breathing signal declines
        p.p.amp_mv = 0.06 + 0.18 * t;               // P amplitude grows
        p.duration_s = 360.0;
        p.fs = 200;
        p.rr_model = RrModel::white;
        p.noise_mv = 0.02;
        spec.by_group[static_cast<std::size_t>(g)] = p;
    }
    return spec;
}

namespace {

constexpr const char* kTrendHeader =
    "group,mean_hr,sdnn_ms,respiration_hz,respiration_depth,"
    "p_amp,p_width,p_offset,q_amp,q_width,q_offset,r_amp,r_width,r_offset,"
    "s_amp,s_width,s_offset,t_amp,t_width,t_offset,duration_s,fs,rr_model,noise_mv";

}  // namespace

void TrendSpec::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write trend spec: " + path);
    out << kTrendHeader << '\n';
    out.precision(10);
    for (int g = 0; g < kNumAgeGroups; ++g) {
        const auto& p = by_group[static_cast<std::size_t>(g)];
        out << g << ',' << p.mean_hr << ',' << p.sdnn_target_ms << ',' << p.respiration_hz << ','
            << p.respiration_depth;
        for (const WaveSpec* w : {&p.p, &p.q, &p.r, &p.s, &p.t}) {
            out << ',' << w->amp_mv << ',' << w->width_ms << ',' << w->offset_ms;
        }
        out << ',' << p.duration_s << ',' << p.fs << ',' << rr_model_name(p.rr_model) << ','
            << p.noise_mv << '\n';
    }
}

TrendSpec TrendSpec::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open trend spec: " + path);
    TrendSpec spec = defaults();
    std::array<bool, kNumAgeGroups> seen{};
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::vector<std::string> cols;
        std::string tok;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        if (cols.size() != 24) throw DataError("malformed trend spec row: " + line);
        const int g = std::stoi(cols[0]);
        if (g < 0 || g >= kNumAgeGroups) throw DataError("trend spec group out of range");
        SynthParams p;
        p.mean_hr = std::stod(cols[1]);
        p.sdnn_target_ms = std::stod(cols[2]);
        p.respiration_hz = std::stod(cols[3]);
        p.respiration_depth = std::stod(cols[4]);
        WaveSpec* waves[] = {&p.p, &p.q, &p.r, &p.s, &p.t};
        for (int w = 0; w < 5; ++w) {
            waves[w]->amp_mv = std::stod(cols[5 + 3 * w]);
            waves[w]->width_ms = std::stod(cols[6 + 3 * w]);
            waves[w]->offset_ms = std::stod(cols[7 + 3 * w]);
        }
        p.duration_s = std::stod(cols[20]);
        p.fs = std::stoi(cols[21]);
        p.rr_model = parse_rr_model(cols[22]);
        p.noise_mv = std::stod(cols[23]);
        spec.by_group[static_cast<std::size_t>(g)] = p;
        seen[static_cast<std::size_t>(g)] = true;
    }
    for (int g = 0; g < kNumAgeGroups; ++g) {
        if (!seen[static_cast<std::size_t>(g)]) {
            throw DataError("trend spec missing group " + std::to_string(g));
        }
    }
    return spec;
}

SynthCohort synth_cohort(const TrendSpec& spec, int n_per_group, std::uint64_t seed) {
    if (n_per_group < 1) throw DataError("synth_cohort: n_per_group must be >= 1");
    SynthCohort out;
    Rng root(seed);
    for (int g = 0; g < kNumAgeGroups; ++g) {
        const SynthParams& base = spec.by_group[static_cast<std::size_t>(g)];
        base.validate();
        for (int j = 0; j < n_per_group; ++j) {
            Rng jitter = root.stream(mix_seed(static_cast<std::uint64_t>(g) * 1000 + 1,
                                              static_cast<std::uint64_t>(j)));
            auto jit = [&](double v) { return v * (1.0 + jitter.uniform(-0.05, 0.05)); };
            SynthParams p = base;
            p.mean_hr = jit(base.mean_hr);
            p.sdnn_target_ms = jit(base.sdnn_target_ms);
            p.respiration_hz = jit(base.respiration_hz);
            p.respiration_depth = jit(base.respiration_depth);
            p.p.amp_mv = jit(base.p.amp_mv);
            p.q.amp_mv = jit(base.q.amp_mv);
            p.r.amp_mv = jit(base.r.amp_mv);
            p.s.amp_mv = jit(base.s.amp_mv);
            p.t.amp_mv = jit(base.t.amp_mv);
            p.seed = mix_seed(seed, static_cast<std::uint64_t>(g) * 100000 +
                                        static_cast<std::uint64_t>(j) + 7);

            auto [record, truth] = synth_record(p);
            char id[32];
            std::snprintf(id, sizeof(id), "g%02d_r%03d", g, j);
            record.record_id = id;
            record.age_group = AgeGroup::from_index(g);
            out.truth.emplace(record.record_id, std::move(truth));
            out.cohort.records.push_back(std::move(record));
        }
    }
    return out;
}

}  // namespace ecgaging::synthgen
