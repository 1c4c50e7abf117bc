#include "ecgaging/signal_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ecgaging/dsp.hpp"

namespace ecgaging::signal_io {

namespace fs = std::filesystem;

SignalFormat parse_format(const std::string& name) {
    if (name == "wfdb16") return SignalFormat::wfdb16;
    if (name == "csv") return SignalFormat::csv;
    throw DataError("unsupported format code: " + name);
}

std::string format_name(SignalFormat fmt) {
    return fmt == SignalFormat::wfdb16 ? "wfdb16" : "csv";
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

struct WfdbSignalSpec {
    std::string file;
    int format = 0;
    double gain = 200.0;    // adu per mV; WFDB default when 0/absent
    double baseline = 0.0;  // adu at 0 mV
    std::string description;
};

// "200", "200(12)", "200/mV", "200(12)/mV"
void parse_gain_token(const std::string& token, WfdbSignalSpec& spec, bool& baseline_given) {
    std::string t = token;
    const auto slash = t.find('/');
    if (slash != std::string::npos) t = t.substr(0, slash);
    const auto open = t.find('(');
    if (open != std::string::npos) {
        const auto close = t.find(')', open);
        if (close == std::string::npos) throw DataError("malformed header: gain token " + token);
        spec.baseline = std::stod(t.substr(open + 1, close - open - 1));
        baseline_given = true;
        t = t.substr(0, open);
    }
    const double g = t.empty() ? 0.0 : std::stod(t);
    spec.gain = (g == 0.0) ? 200.0 : g;
}

EcgRecord read_wfdb16(const std::string& path_in) {
    fs::path hea_path(path_in);
    if (hea_path.extension() != ".hea") hea_path += ".hea";
    std::ifstream hea(hea_path);
    if (!hea) throw DataError("cannot open header: " + hea_path.string());

    std::string line;
    // first non-comment, non-empty line is the record line
    std::string record_line;
    while (std::getline(hea, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        record_line = line;
        break;
    }
    if (record_line.empty()) throw DataError("malformed header: empty " + hea_path.string());

    std::istringstream rec(record_line);
    std::string record_name;
    int nsig = 0;
    double fs = 250.0;  // WFDB default sampling frequency
    long long nsamples = 0;
    rec >> record_name >> nsig;
    if (rec.fail() || nsig < 1) throw DataError("malformed header: record line in " + hea_path.string());
    std::string tok;
    if (rec >> tok) {
        // fs field may carry counter-frequency qualifiers ("500/..."); take the lead number
        fs = std::stod(tok);
        if (rec >> tok) nsamples = std::stoll(tok);
    }
    if (fs <= 0) throw DataError("malformed header: non-positive fs in " + hea_path.string());
    if (nsig > 2) {
        throw DataError("unsupported record: " + std::to_string(nsig) +
                        " signals (only 1 or 2 supported)");
    }
    // multi-segment records carry a '/' qualifier in the record name
    if (record_name.find('/') != std::string::npos) {
        throw DataError("unsupported record: multi-segment header " + hea_path.string());
    }

    std::vector<WfdbSignalSpec> specs;
    for (int i = 0; i < nsig; ++i) {
        std::string sig_line;
        do {
            if (!std::getline(hea, sig_line)) {
                throw DataError("malformed header: missing signal line in " + hea_path.string());
            }
            sig_line = trim(sig_line);
        } while (sig_line.empty() || sig_line[0] == '#');

        std::istringstream ss(sig_line);
        WfdbSignalSpec spec;
        std::string fmt_tok, gain_tok;
        ss >> spec.file >> fmt_tok >> gain_tok;
        if (ss.fail()) throw DataError("malformed header: signal line in " + hea_path.string());
        // format may carry a samples-per-frame multiplier ("16x1"); reject anything but plain 16
        const auto x = fmt_tok.find_first_of("x:+");
        const std::string fmt_num = (x == std::string::npos) ? fmt_tok : fmt_tok.substr(0, x);
        if (fmt_num != "16" || x != std::string::npos) {
            throw DataError("unsupported format code: " + fmt_tok + " (only format 16)");
        }
        bool baseline_given = false;
        parse_gain_token(gain_tok, spec, baseline_given);
        // adc_res adc_zero init_value checksum block_size description
        int adc_res = 0, adc_zero = 0;
        if (ss >> adc_res >> adc_zero && !baseline_given) spec.baseline = adc_zero;
        long long init_value = 0, checksum = 0, block_size = 0;
        ss >> init_value >> checksum >> block_size;
        ss.clear();
        std::string rest;
        std::getline(ss, rest);
        spec.description = trim(rest);
        specs.push_back(spec);
    }

    for (const auto& s : specs) {
        if (s.file != specs.front().file) {
            throw DataError("unsupported record: signals split across files in " + hea_path.string());
        }
    }

    fs::path dat_path = hea_path.parent_path() / specs.front().file;
    std::ifstream dat(dat_path, std::ios::binary);
    if (!dat) throw DataError("cannot open signal file: " + dat_path.string());
    dat.seekg(0, std::ios::end);
    const long long bytes = dat.tellg();
    dat.seekg(0, std::ios::beg);
    const long long frame_bytes = 2LL * nsig;
    if (bytes % frame_bytes != 0) {
        throw DataError("signal/header length mismatch: " + dat_path.string());
    }
    const long long frames = bytes / frame_bytes;
    if (nsamples > 0 && frames < nsamples) {
        throw DataError("signal/header length mismatch: header declares " +
                        std::to_string(nsamples) + " frames, file holds " +
                        std::to_string(frames));
    }
    const long long n = (nsamples > 0) ? nsamples : frames;

    // pick the matching lead: prefer a description equal to or containing "II"
    int chan = 0;
    for (int c = 0; c < nsig; ++c) {
        const std::string& d = specs[c].description;
        if (d == "II" || d.find("II") != std::string::npos) {
            chan = c;
            break;
        }
    }

    std::vector<char> raw(static_cast<std::size_t>(n) * frame_bytes);
    dat.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!dat) throw DataError("short read on signal file: " + dat_path.string());

    EcgRecord record;
    record.record_id = record_name;
    record.fs = static_cast<int>(std::lround(fs));
    record.lead = specs[chan].description.empty() ? "ch" + std::to_string(chan)
                                                  : specs[chan].description;
    record.samples.resize(static_cast<std::size_t>(n));
    const double gain = specs[chan].gain;
    const double baseline = specs[chan].baseline;
    for (long long i = 0; i < n; ++i) {
        const std::size_t off = static_cast<std::size_t>(i * frame_bytes + 2 * chan);
        // little-endian two's-complement 16-bit
        const std::uint16_t u = static_cast<std::uint8_t>(raw[off]) |
                                (static_cast<std::uint16_t>(static_cast<std::uint8_t>(raw[off + 1])) << 8);
        const std::int16_t v = static_cast<std::int16_t>(u);
        // -32768 is the WFDB invalid-sample marker in format 16
        record.samples[static_cast<std::size_t>(i)] =
            (v == -32768) ? std::nan("") : (static_cast<double>(v) - baseline) / gain;
    }
    return record;
}

EcgRecord read_csv_record(const std::string& path, int fs_hint) {
    if (fs_hint <= 0) throw DataError("csv record needs a positive fs");
    std::ifstream in(path);
    if (!in) throw DataError("cannot open record: " + path);
    EcgRecord record;
    record.record_id = fs::path(path).stem().string();
    record.fs = fs_hint;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        double v;
        const auto* begin = line.data();
        const auto* end = line.data() + line.size();
        auto res = std::from_chars(begin, end, v);
        if (res.ec != std::errc{}) {
            if (line == "nan" || line == "NaN" || line == "NAN") {
                v = std::nan("");
            } else if (first) {
                first = false;  // tolerate a single header line
                continue;
            } else {
                throw DataError("malformed sample line in " + path + ": " + line);
            }
        }
        record.samples.push_back(v);
        first = false;
    }
    if (record.samples.empty()) throw DataError("empty record: " + path);
    return record;
}

}  // namespace

EcgRecord read_record(const std::string& path, SignalFormat fmt, int fs_hint) {
    switch (fmt) {
        case SignalFormat::wfdb16:
            return read_wfdb16(path);
        case SignalFormat::csv:
            return read_csv_record(path, fs_hint);
    }
    throw DataError("unsupported format");
}

EcgRecord resample(const EcgRecord& record, int target_fs) {
    if (target_fs <= 0) throw DataError("resample: target_fs must be positive");
    if (target_fs == record.fs) return record;
    if (record.fs % target_fs != 0) {
        throw DataError("resample: " + std::to_string(record.fs) + " -> " +
                        std::to_string(target_fs) + " is not an integer decimation");
    }
    const int ratio = record.fs / target_fs;
    // zero-phase anti-alias low-pass: symmetric FIR, cutoff 0.45 * target_fs
    const std::size_t taps = static_cast<std::size_t>(8 * ratio) | 1u;
    const auto kernel = dsp::lowpass_fir(0.45 * target_fs, record.fs, taps);
    const auto filtered = dsp::convolve_same(record.samples, kernel);

    EcgRecord out;
    out.record_id = record.record_id;
    out.fs = target_fs;
    out.lead = record.lead;
    out.age_group = record.age_group;
    out.samples.reserve((record.samples.size() + ratio - 1) / ratio);
    for (std::size_t i = 0; i < filtered.size(); i += static_cast<std::size_t>(ratio)) {
        out.samples.push_back(filtered[i]);
    }
    return out;
}

EcgRecord impute_missing(const EcgRecord& record) {
    EcgRecord out = record;
    auto& x = out.samples;
    const std::size_t n = x.size();
    std::size_t first_finite = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isfinite(x[i])) {
            first_finite = i;
            break;
        }
    }
    if (first_finite == n) throw DataError("impute_missing: all samples non-finite");

    for (std::size_t i = 0; i < first_finite; ++i) x[i] = x[first_finite];
    std::size_t last = first_finite;
    for (std::size_t i = first_finite + 1; i < n; ++i) {
        if (!std::isfinite(x[i])) continue;
        if (i > last + 1) {
            const double step = (x[i] - x[last]) / static_cast<double>(i - last);
            for (std::size_t k = last + 1; k < i; ++k) {
                x[k] = x[last] + step * static_cast<double>(k - last);
            }
        }
        last = i;
    }
    for (std::size_t i = last + 1; i < n; ++i) x[i] = x[last];
    return out;
}

Cohort load_cohort(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw DataError("cannot open manifest: " + manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();

    Cohort cohort;
    cohort.manifest_path = manifest_path;
    std::set<std::string> seen;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (!header_done) {
            header_done = true;
            if (line.rfind("record_id,", 0) == 0) continue;  // header row
        }
        const auto cols = split(line, ',');
        if (cols.size() < 5) throw DataError("malformed manifest row: " + line);
        const std::string id = trim(cols[0]);
        if (!seen.insert(id).second) throw DataError("duplicate record_id: " + id);
        const std::string age_str = trim(cols[4]);
        if (age_str.empty()) {
            ++cohort.excluded_missing_age;
            continue;
        }
        const int age = std::stoi(age_str);
        const auto group = AgeGroup::from_age(age);
        if (!group) throw DataError("age outside 18-92 for record " + id);

        fs::path rec_path(trim(cols[1]));
        if (rec_path.is_relative()) rec_path = base / rec_path;
        const auto fmt = parse_format(trim(cols[2]));
        const int fs_field = std::stoi(trim(cols[3]));
        EcgRecord record = read_record(rec_path.string(), fmt, fs_field);
        record.record_id = id;
        record.age_group = group;
        cohort.records.push_back(std::move(record));
    }
    return cohort;
}

void write_csv_record(const EcgRecord& record, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write record: " + path);
    out.precision(10);
    for (double v : record.samples) {
        if (std::isfinite(v))
            out << v << '\n';
        else
            out << "nan\n";
    }
    if (!out) throw DataError("write failed: " + path);
}

void write_manifest(const std::vector<ManifestRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest: " + path);
    out << "record_id,path,format,fs,age\n";
    for (const auto& r : rows) {
        out << r.record_id << ',' << r.path << ',' << format_name(r.format) << ',' << r.fs << ',';
        if (r.age) out << *r.age;
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

}  // namespace ecgaging::signal_io
