#include <doctest.h>

#include <cmath>

#include "ecgaging/dsp.hpp"

using namespace ecgaging;
namespace dsp = ecgaging::dsp;

TEST_CASE("fft round-trip") {
    Rng rng(1);
    std::vector<std::complex<double>> a(256);
    for (auto& z : a) z = {rng.normal(), rng.normal()};
    auto b = a;
    dsp::fft(b, false);
    dsp::fft(b, true);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::abs(a[i] - b[i]) < 1e-10);
    }
}

TEST_CASE("welch psd locates a pure tone and conserves its power") {
    const double fs = 4.0, f0 = 0.25, amp = 2.0;
    std::vector<double> x(2048);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = amp * std::sin(2.0 * M_PI * f0 * static_cast<double>(i) / fs);
    }
    const auto psd = dsp::welch_psd(x, fs, 256);
    const long k = dsp::band_argmax(psd, 0.05, 1.0);
    REQUIRE(k > 0);
    CHECK(std::abs(psd.freq[static_cast<std::size_t>(k)] - f0) <= psd.df);
    // total band power ~ amp^2/2
    CHECK(dsp::band_power(psd, 0.1, 0.5) == doctest::Approx(amp * amp / 2.0).epsilon(0.05));
    CHECK(dsp::parabolic_peak_hz(psd, k) == doctest::Approx(f0).epsilon(0.01));
}

TEST_CASE("linear_fit recovers slope and intercept") {
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
        x.push_back(i);
        y.push_back(3.5 * i - 2.0);
    }
    const auto fit = dsp::linear_fit(x, y);
    CHECK(fit.slope == doctest::Approx(3.5));
    CHECK(fit.intercept == doctest::Approx(-2.0));
}

TEST_CASE("interp_linear holds ends and interpolates interior") {
    std::vector<double> xs{0.0, 1.0, 3.0};
    std::vector<double> ys{0.0, 10.0, 30.0};
    std::vector<double> grid{-1.0, 0.5, 2.0, 5.0};
    const auto out = dsp::interp_linear(xs, ys, grid);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == doctest::Approx(5.0));
    CHECK(out[2] == doctest::Approx(20.0));
    CHECK(out[3] == 30.0);
}

TEST_CASE("median handles odd and even sizes") {
    CHECK(dsp::median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(dsp::median({4.0, 1.0, 2.0, 3.0}) == doctest::Approx(2.5));
}

TEST_CASE("pink noise has unit variance and 1/f-ish spectrum") {
    Rng rng(7);
    const auto x = dsp::pink_noise(4096, rng);
    CHECK(dsp::mean(x) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(dsp::sample_stddev(x) == doctest::Approx(1.0).epsilon(1e-9));
    const auto psd = dsp::welch_psd(x, 1.0, 1024);
    // power at 0.01 should sit well above power at 0.4
    const double lo = dsp::band_power(psd, 0.005, 0.02);
    const double hi = dsp::band_power(psd, 0.35, 0.45);
    CHECK(lo / 0.015 > 5.0 * hi / 0.10);
}

TEST_CASE("zero-phase fir keeps a slow tone aligned") {
    const double fs = 1000.0;
    std::vector<double> x(4000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::sin(2.0 * M_PI * 2.0 * static_cast<double>(i) / fs);
    }
    const auto kernel = dsp::lowpass_fir(45.0, fs, 81);
    const auto y = dsp::convolve_same(x, kernel);
    for (std::size_t i = 200; i + 200 < x.size(); ++i) {
        REQUIRE(std::abs(y[i] - x[i]) < 1e-3);  // no delay, no attenuation
    }
}
