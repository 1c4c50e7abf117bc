#include "ecgaging/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ecgaging::dsp {

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw NumericalError("fft: size must be a power of two");
    }
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& z : a) z /= static_cast<double>(n);
    }
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<double> lowpass_fir(double cutoff_hz, double fs, std::size_t n_taps) {
    if (n_taps % 2 == 0) ++n_taps;
    const double fc = cutoff_hz / fs;  // normalized (cycles/sample)
    const long mid = static_cast<long>(n_taps / 2);
    std::vector<double> h(n_taps);
    for (long i = 0; i < static_cast<long>(n_taps); ++i) {
        const long m = i - mid;
        const double sinc = (m == 0) ? 2.0 * fc
                                     : std::sin(2.0 * M_PI * fc * m) / (M_PI * m);
        const double w = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (n_taps - 1));
        h[i] = sinc * w;
    }
    const double sum = std::accumulate(h.begin(), h.end(), 0.0);
    for (auto& v : h) v /= sum;
    return h;
}

std::vector<double> convolve_same(std::span<const double> x, std::span<const double> kernel) {
    const long n = static_cast<long>(x.size());
    const long kl = static_cast<long>(kernel.size());
    const long mid = kl / 2;
    std::vector<double> out(x.size(), 0.0);
    auto reflect = [n](long idx) {
        while (idx < 0 || idx >= n) {
            if (idx < 0) idx = -idx - 1;
            if (idx >= n) idx = 2 * n - idx - 1;
        }
        return idx;
    };
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long k = 0; k < kl; ++k) {
            acc += kernel[k] * x[reflect(i + mid - k)];
        }
        out[i] = acc;
    }
    return out;
}

std::vector<double> Biquad::apply(std::span<const double> x) const {
    std::vector<double> y(x.size());
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = b0 * x[i] + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
        x2 = x1;
        x1 = x[i];
        y2 = y1;
        y1 = v;
        y[i] = v;
    }
    return y;
}

Biquad butter_lowpass(double cutoff_hz, double fs) {
    const double k = std::tan(M_PI * cutoff_hz / fs);
    const double q = std::sqrt(2.0);
    const double norm = 1.0 / (1.0 + q * k + k * k);
    Biquad f{};
    f.b0 = k * k * norm;
    f.b1 = 2.0 * f.b0;
    f.b2 = f.b0;
    f.a1 = 2.0 * (k * k - 1.0) * norm;
    f.a2 = (1.0 - q * k + k * k) * norm;
    return f;
}

Biquad butter_highpass(double cutoff_hz, double fs) {
    const double k = std::tan(M_PI * cutoff_hz / fs);
    const double q = std::sqrt(2.0);
    const double norm = 1.0 / (1.0 + q * k + k * k);
    Biquad f{};
    f.b0 = norm;
    f.b1 = -2.0 * norm;
    f.b2 = norm;
    f.a1 = 2.0 * (k * k - 1.0) * norm;
    f.a2 = (1.0 - q * k + k * k) * norm;
    return f;
}

Psd welch_psd(std::span<const double> x, double fs, std::size_t seg_len) {
    if (x.size() < 8) throw NumericalError("welch_psd: series too short");
    seg_len = std::min(seg_len, x.size());
    if (seg_len < 8) seg_len = 8;
    const std::size_t hop = seg_len / 2;
    const std::size_t nfft = next_pow2(seg_len) * 2;  // zero-pad for finer bins

    std::vector<double> window(seg_len);
    double wss = 0.0;  // sum of squared window values
    for (std::size_t i = 0; i < seg_len; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (seg_len - 1)));
        wss += window[i] * window[i];
    }

    Psd psd;
    psd.freq.resize(nfft / 2 + 1);
    psd.power.assign(nfft / 2 + 1, 0.0);
    psd.df = fs / static_cast<double>(nfft);
    for (std::size_t k = 0; k <= nfft / 2; ++k) psd.freq[k] = psd.df * static_cast<double>(k);

    std::size_t n_segments = 0;
    std::vector<std::complex<double>> buf;
    for (std::size_t start = 0; start + seg_len <= x.size(); start += hop) {
        buf.assign(nfft, {0.0, 0.0});
        double seg_mean = 0.0;
        for (std::size_t i = 0; i < seg_len; ++i) seg_mean += x[start + i];
        seg_mean /= static_cast<double>(seg_len);
        for (std::size_t i = 0; i < seg_len; ++i) {
            buf[i] = {(x[start + i] - seg_mean) * window[i], 0.0};
        }
        fft(buf, false);
        for (std::size_t k = 0; k <= nfft / 2; ++k) {
            double p = std::norm(buf[k]) / (fs * wss);
            if (k != 0 && k != nfft / 2) p *= 2.0;  // one-sided
            psd.power[k] += p;
        }
        ++n_segments;
        if (hop == 0) break;
    }
    if (n_segments == 0) throw NumericalError("welch_psd: no full segment fits");
    for (auto& p : psd.power) p /= static_cast<double>(n_segments);
    return psd;
}

double band_power(const Psd& psd, double f_lo, double f_hi) {
    double total = 0.0;
    for (std::size_t k = 0; k < psd.freq.size(); ++k) {
        if (psd.freq[k] >= f_lo && psd.freq[k] <= f_hi) total += psd.power[k] * psd.df;
    }
    return total;
}

long band_argmax(const Psd& psd, double f_lo, double f_hi) {
    long best = -1;
    double best_p = -1.0;
    for (std::size_t k = 0; k < psd.freq.size(); ++k) {
        if (psd.freq[k] >= f_lo && psd.freq[k] <= f_hi && psd.power[k] > best_p) {
            best_p = psd.power[k];
            best = static_cast<long>(k);
        }
    }
    return best;
}

double parabolic_peak_hz(const Psd& psd, long k) {
    if (k <= 0 || k + 1 >= static_cast<long>(psd.freq.size())) return psd.freq[k];
    const double a = psd.power[k - 1], b = psd.power[k], c = psd.power[k + 1];
    const double denom = a - 2.0 * b + c;
    if (denom == 0.0) return psd.freq[k];
    double delta = 0.5 * (a - c) / denom;
    delta = std::clamp(delta, -0.5, 0.5);
    return psd.freq[k] + delta * psd.df;
}

LinFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw NumericalError("linear_fit: need >= 2 points");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw NumericalError("linear_fit: degenerate abscissa");
    LinFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

std::vector<double> interp_linear(std::span<const double> xs, std::span<const double> ys,
                                  std::span<const double> grid) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw NumericalError("interp_linear: need >= 2 knots");
    }
    std::vector<double> out(grid.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double g = grid[i];
        if (g <= xs.front()) {
            out[i] = ys.front();
            continue;
        }
        if (g >= xs.back()) {
            out[i] = ys.back();
            continue;
        }
        while (j + 2 < xs.size() && xs[j + 1] < g) ++j;
        const double t = (g - xs[j]) / (xs[j + 1] - xs[j]);
        out[i] = ys[j] + t * (ys[j + 1] - ys[j]);
    }
    return out;
}

double median(std::vector<double> v) {
    if (v.empty()) throw NumericalError("median: empty");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        const double lo = *std::max_element(v.begin(), v.begin() + mid);
        m = 0.5 * (m + lo);
    }
    return m;
}

double mean(std::span<const double> v) {
    if (v.empty()) throw NumericalError("mean: empty");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_stddev(std::span<const double> v) {
    if (v.size() < 2) throw NumericalError("sample_stddev: need >= 2 values");
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::vector<double> pink_noise(std::size_t n, Rng& rng) {
    if (n < 2) throw NumericalError("pink_noise: n too small");
    const std::size_t nfft = next_pow2(n);
    std::vector<std::complex<double>> spec(nfft, {0.0, 0.0});
    // Hermitian spectrum with amplitude f^{-1/2} and random phase
    for (std::size_t k = 1; k <= nfft / 2; ++k) {
        const double amp = 1.0 / std::sqrt(static_cast<double>(k));
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        const std::complex<double> z(amp * std::cos(phase), amp * std::sin(phase));
        spec[k] = z;
        if (k != nfft / 2) spec[nfft - k] = std::conj(z);
    }
    spec[nfft / 2] = {spec[nfft / 2].real(), 0.0};
    fft(spec, true);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = spec[i].real();
    const double m = mean(x);
    for (auto& v : x) v -= m;
    double sd = sample_stddev(x);
    if (sd == 0.0) sd = 1.0;
    for (auto& v : x) v /= sd;
    return x;
}

}  // namespace ecgaging::dsp
