#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "ecgaging/common.hpp"

namespace ecgaging::dsp {

// In-place radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& a, bool inverse);

std::size_t next_pow2(std::size_t n);

// Windowed-sinc (Hamming) low-pass FIR; odd tap count, unit DC gain.
std::vector<double> lowpass_fir(double cutoff_hz, double fs, std::size_t n_taps);

// Convolve with a symmetric kernel, reflect padding at the edges. With an
// odd symmetric kernel the output is delay-free (zero phase).
std::vector<double> convolve_same(std::span<const double> x, std::span<const double> kernel);

// Second-order Butterworth section (bilinear transform).
struct Biquad {
    double b0, b1, b2, a1, a2;
    std::vector<double> apply(std::span<const double> x) const;
};

Biquad butter_lowpass(double cutoff_hz, double fs);
Biquad butter_highpass(double cutoff_hz, double fs);

struct Psd {
    std::vector<double> freq;   // Hz
    std::vector<double> power;  // density, unit^2/Hz
    double df = 0.0;
};

// Welch periodogram: Hann window, 50% overlap, segments zero-padded to the
// next power of two. seg_len is clamped to the series length.
Psd welch_psd(std::span<const double> x, double fs, std::size_t seg_len);

// Rectangle integration of the PSD over [f_lo, f_hi].
double band_power(const Psd& psd, double f_lo, double f_hi);

// Bin index of the largest power in [f_lo, f_hi]; -1 if the band is empty.
long band_argmax(const Psd& psd, double f_lo, double f_hi);

// Parabolic refinement of a spectral peak position around bin k.
double parabolic_peak_hz(const Psd& psd, long k);

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LinFit linear_fit(std::span<const double> x, std::span<const double> y);

// Piecewise-linear resample of (xs, ys) onto grid points; grid values outside
// [xs.front(), xs.back()] are held at the nearest endpoint.
std::vector<double> interp_linear(std::span<const double> xs, std::span<const double> ys,
                                  std::span<const double> grid);

double median(std::vector<double> v);  // by value: the copy gets reordered
double mean(std::span<const double> v);
double sample_stddev(std::span<const double> v);  // n-1 denominator

// Unit-variance 1/f (pink) series via spectral synthesis; used both by the
// RR-interval models and as a DFA calibration source.
std::vector<double> pink_noise(std::size_t n, Rng& rng);

}  // namespace ecgaging::dsp
