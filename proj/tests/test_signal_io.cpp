#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <fstream>

#include "ecgaging/common.hpp"
#include "ecgaging/signal_io.hpp"
#include "test_util.hpp"

using namespace ecgaging;
namespace sio = ecgaging::signal_io;

namespace {

void write_dat_le16(const std::string& path, const std::vector<std::int16_t>& samples) {
    std::ofstream out(path, std::ios::binary);
    for (std::int16_t v : samples) {
        const char bytes[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
        out.write(bytes, 2);
    }
}

// Independent format-16 decode: little-endian two's-complement int16,
// (raw - baseline) / gain. Used as the reference reader.
std::vector<double> reference_decode(const std::string& dat_path, int nsig, int chan,
                                     double gain, double baseline) {
    std::ifstream in(dat_path, std::ios::binary);
    std::vector<double> out;
    for (;;) {
        std::vector<unsigned char> frame(static_cast<std::size_t>(2 * nsig));
        in.read(reinterpret_cast<char*>(frame.data()), 2 * nsig);
        if (!in) break;
        const std::uint16_t u = frame[2 * chan] | (frame[2 * chan + 1] << 8);
        out.push_back((static_cast<double>(static_cast<std::int16_t>(u)) - baseline) / gain);
    }
    return out;
}

}  // namespace

TEST_CASE("age group mapping is total on 18-92 and rejects outside") {
    CHECK(AgeGroup::from_age(18)->index == 0);
    CHECK(AgeGroup::from_age(19)->index == 0);
    CHECK(AgeGroup::from_age(20)->index == 1);
    CHECK(AgeGroup::from_age(22)->index == 1);
    CHECK(AgeGroup::from_age(24)->index == 1);
    CHECK(AgeGroup::from_age(25)->index == 2);
    CHECK(AgeGroup::from_age(84)->index == 13);
    CHECK(AgeGroup::from_age(85)->index == 14);
    CHECK(AgeGroup::from_age(92)->index == 14);
    CHECK_FALSE(AgeGroup::from_age(17).has_value());
    CHECK_FALSE(AgeGroup::from_age(93).has_value());
    for (int age = 18; age <= 92; ++age) {
        auto g = AgeGroup::from_age(age);
        REQUIRE(g.has_value());
        CHECK(g->lo <= age);
        CHECK(age <= g->hi);
    }
}

TEST_CASE("wfdb16: gain and baseline applied per header") {
    TempDir dir("wfdb");
    write_dat_le16(dir.file("rec.dat"), {400, -400, 0, 200});
    write_text(dir.file("rec.hea"),
               "rec 1 1000 4\n"
               "rec.dat 16 200(0)/mV 16 0 400 0 0 II\n");
    const auto rec = sio::read_record(dir.file("rec.hea"), sio::SignalFormat::wfdb16);
    REQUIRE(rec.samples.size() == 4);
    CHECK(rec.samples[0] == doctest::Approx(2.0));  // (400 - 0) / 200
    CHECK(rec.samples[1] == doctest::Approx(-2.0));
    CHECK(rec.fs == 1000);
    CHECK(rec.lead == "II");
}

TEST_CASE("wfdb16: matches reference decoder on a two-signal record") {
    TempDir dir("wfdb2");
    Rng rng(7);
    std::vector<std::int16_t> interleaved;
    for (int i = 0; i < 500; ++i) {
        interleaved.push_back(static_cast<std::int16_t>(rng.index(4000)) - 2000);
        interleaved.push_back(static_cast<std::int16_t>(rng.index(4000)) - 2000);
    }
    write_dat_le16(dir.file("r2.dat"), interleaved);
    write_text(dir.file("r2.hea"),
               "r2 2 1000 500\n"
               "r2.dat 16 1000(12)/mV 16 0 0 0 0 I\n"
               "r2.dat 16 500(-3)/mV 16 0 0 0 0 II\n");
    const auto rec = sio::read_record(dir.file("r2"), sio::SignalFormat::wfdb16);
    const auto ref = reference_decode(dir.file("r2.dat"), 2, 1, 500.0, -3.0);  // lead II
    REQUIRE(rec.samples.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        REQUIRE(rec.samples[i] == ref[i]);  // byte-identical decode path
    }
    CHECK(rec.lead == "II");
}

TEST_CASE("wfdb16: malformed and unsupported headers error") {
    TempDir dir("wfdbbad");
    write_dat_le16(dir.file("b.dat"), {1, 2, 3});
    write_text(dir.file("b.hea"), "b 1 1000 4\nb.dat 16 200/mV 16 0 0 0 0 II\n");
    CHECK_THROWS_AS(sio::read_record(dir.file("b"), sio::SignalFormat::wfdb16), DataError);

    write_text(dir.file("c.hea"), "c 1 1000 3\nc.dat 212 200/mV 16 0 0 0 0 II\n");
    write_dat_le16(dir.file("c.dat"), {1, 2, 3});
    CHECK_THROWS_AS(sio::read_record(dir.file("c"), sio::SignalFormat::wfdb16), DataError);

    CHECK_THROWS_AS(sio::read_record(dir.file("missing"), sio::SignalFormat::wfdb16), DataError);
}

TEST_CASE("csv record: N rows in, N samples out") {
    TempDir dir("csv");
    std::string body;
    for (int i = 0; i < 250; ++i) body += std::to_string(0.001 * i) + "\n";
    write_text(dir.file("r.csv"), body);
    const auto rec = sio::read_record(dir.file("r.csv"), sio::SignalFormat::csv, 1000);
    CHECK(rec.samples.size() == 250);
    CHECK(rec.fs == 1000);
    CHECK(rec.samples[10] == doctest::Approx(0.010));
}

TEST_CASE("csv record round-trips through write_csv_record") {
    TempDir dir("csvrt");
    EcgRecord rec;
    rec.fs = 100;
    Rng rng(3);
    for (int i = 0; i < 300; ++i) rec.samples.push_back(rng.normal());
    rec.samples[42] = std::nan("");
    sio::write_csv_record(rec, dir.file("x.csv"));
    const auto back = sio::read_record(dir.file("x.csv"), sio::SignalFormat::csv, 100);
    REQUIRE(back.samples.size() == rec.samples.size());
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        if (std::isnan(rec.samples[i])) {
            CHECK(std::isnan(back.samples[i]));
        } else {
            CHECK(back.samples[i] == doctest::Approx(rec.samples[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("resample: decimation length, DC preservation, tone fidelity") {
    EcgRecord rec;
    rec.fs = 1000;
    rec.samples.assign(10000, 0.0);
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        rec.samples[i] = std::sin(2.0 * M_PI * 5.0 * static_cast<double>(i) / 1000.0);
    }
    const auto down = sio::resample(rec, 100);
    CHECK(down.fs == 100);
    CHECK(down.samples.size() == 1000);

    // 5 Hz tone survives with < 1% amplitude error away from the edges
    double worst = 0.0;
    for (std::size_t i = 50; i + 50 < down.samples.size(); ++i) {
        const double expect = std::sin(2.0 * M_PI * 5.0 * static_cast<double>(i) / 100.0);
        worst = std::max(worst, std::abs(down.samples[i] - expect));
    }
    CHECK(worst < 0.01);

    EcgRecord dc;
    dc.fs = 600;
    dc.samples.assign(1234, 0.73);
    const auto dc_down = sio::resample(dc, 100);
    CHECK(dc_down.samples.size() == 206);  // ceil(1234/6)
    for (std::size_t i = 0; i < dc_down.samples.size(); ++i) {
        CHECK(dc_down.samples[i] == doctest::Approx(0.73).epsilon(1e-6));
    }

    CHECK_THROWS_AS(sio::resample(rec, 300), DataError);  // non-integer ratio
    const auto same = sio::resample(rec, 1000);
    CHECK(same.samples.size() == rec.samples.size());

    // idempotent on length
    const auto twice = sio::resample(down, 100);
    CHECK(twice.samples.size() == down.samples.size());
}

TEST_CASE("impute_missing: interpolation and hold rules") {
    EcgRecord rec;
    rec.fs = 100;
    rec.samples = {1.0, std::nan(""), 3.0};
    auto out = sio::impute_missing(rec);
    CHECK(out.samples[1] == doctest::Approx(2.0));

    rec.samples = {std::nan(""), std::nan(""), 5.0};
    out = sio::impute_missing(rec);
    CHECK(out.samples[0] == 5.0);
    CHECK(out.samples[1] == 5.0);
    CHECK(out.samples[2] == 5.0);

    rec.samples = {1.0, 2.0, 3.0};
    out = sio::impute_missing(rec);
    CHECK(out.samples == rec.samples);

    rec.samples = {std::nan(""), std::nan("")};
    CHECK_THROWS_AS(sio::impute_missing(rec), DataError);
}

TEST_CASE("impute_missing leaves no non-finite value behind (random masks)") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        EcgRecord rec;
        rec.fs = 100;
        const std::size_t n = 20 + rng.index(200);
        for (std::size_t i = 0; i < n; ++i) rec.samples.push_back(rng.normal());
        std::size_t n_masked = 0;
        for (auto& v : rec.samples) {
            if (rng.uniform() < 0.3) {
                v = rng.uniform() < 0.5 ? std::nan("") : INFINITY;
                ++n_masked;
            }
        }
        if (n_masked == n) rec.samples[0] = 0.5;  // keep one finite sample
        const auto out = sio::impute_missing(rec);
        for (double v : out.samples) CHECK(std::isfinite(v));
    }
}

TEST_CASE("load_cohort: age mapping, exclusions, duplicate ids") {
    TempDir dir("cohort");
    write_text(dir.file("a.csv"), "0.0\n0.1\n0.2\n");
    write_text(dir.file("b.csv"), "0.0\n0.1\n");
    write_text(dir.file("c.csv"), "0.3\n");
    write_text(dir.file("manifest.csv"),
               "record_id,path,format,fs,age\n"
               "a,a.csv,csv,100,22\n"
               "b,b.csv,csv,100,18\n"
               "c,c.csv,csv,100,\n");
    const auto cohort = sio::load_cohort(dir.file("manifest.csv"));
    REQUIRE(cohort.records.size() == 2);
    CHECK(cohort.records[0].age_group->index == 1);  // 22 -> 20-24
    CHECK(cohort.records[1].age_group->index == 0);  // 18 -> 18-19
    CHECK(cohort.excluded_missing_age == 1);

    write_text(dir.file("dup.csv"),
               "record_id,path,format,fs,age\n"
               "a,a.csv,csv,100,22\n"
               "a,b.csv,csv,100,30\n");
    CHECK_THROWS_AS(sio::load_cohort(dir.file("dup.csv")), DataError);
    CHECK_THROWS_AS(sio::load_cohort(dir.file("nonexistent.csv")), DataError);
}
