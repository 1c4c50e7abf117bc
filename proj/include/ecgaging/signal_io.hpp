#pragma once

#include <string>

#include "ecgaging/types.hpp"

namespace ecgaging::signal_io {

enum class SignalFormat { wfdb16, csv };

SignalFormat parse_format(const std::string& name);
std::string format_name(SignalFormat fmt);

// Read one record. For wfdb16 `path` is the .hea file (or the record name
// without extension); fs comes from the header and fs_hint is ignored. For
// csv `path` holds one sample per line in mV and fs_hint must be > 0.
// WFDB support is limited to format-16 single/dual-signal records; the lead
// named "II" is preferred when two signals are present.
EcgRecord read_record(const std::string& path, SignalFormat fmt, int fs_hint = 0);

// Integer decimation with an anti-alias low-pass (zero-phase FIR, cutoff
// 0.45 * target_fs) applied first. target_fs must divide fs evenly.
EcgRecord resample(const EcgRecord& record, int target_fs);

// Replace non-finite samples by linear interpolation between the nearest
// finite neighbours; leading/trailing gaps hold the nearest finite value.
EcgRecord impute_missing(const EcgRecord& record);

// Manifest CSV with header record_id,path,format,fs,age. Relative record
// paths are resolved against the manifest's directory. Records with a
// missing age are excluded and counted in Cohort::excluded_missing_age.
Cohort load_cohort(const std::string& manifest_path);

void write_csv_record(const EcgRecord& record, const std::string& path);

struct ManifestRow {
    std::string record_id;
    std::string path;
    SignalFormat format = SignalFormat::csv;
    int fs = 0;
    std::optional<int> age;
};

void write_manifest(const std::vector<ManifestRow>& rows, const std::string& path);

}  // namespace ecgaging::signal_io
