#pragma once

// Welch averaged periodograms of complex time series (FFTW backend) and the
// expected value of that estimator for a known autocovariance.
//
// Convention: P(nu) = dt |sum_n w_n x_n exp(i nu n dt)|^2 / (2 pi sum_n w_n^2),
// an estimate of S(nu) = (1/2pi) int <x(t+tau) x*(t)> exp(i nu tau) dtau.

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace eitnoise {

enum class WindowKind { Hann, Rectangular };

std::vector<double> make_window(WindowKind kind, std::size_t length);
std::string window_name(WindowKind kind);
WindowKind window_from_name(const std::string& name);

class WelchEstimator {
public:
    WelchEstimator(std::size_t segment_length, double overlap, WindowKind window, double dt);
    ~WelchEstimator();
    WelchEstimator(const WelchEstimator&) = delete;
    WelchEstimator& operator=(const WelchEstimator&) = delete;

    std::size_t segment_length() const { return length_; }
    std::size_t hop() const { return hop_; }
    std::size_t segment_count(std::size_t n_samples) const;
    const std::vector<double>& window() const { return window_; }

    /// Bin frequencies in ascending order, nu in [-pi/dt, pi/dt).
    std::vector<double> frequencies() const;

    /// Averaged periodogram in ascending-frequency order. Safe to call from
    /// several threads at once; each call uses its own buffers.
    void estimate(const std::complex<double>* x, std::size_t n_samples, double* psd) const;

private:
    std::size_t length_;
    std::size_t hop_;
    double dt_;
    std::vector<double> window_;
    double window_power_ = 0.0;
    struct Plan;
    std::unique_ptr<Plan> plan_;
};

/// Samples c(k dt), k = 0 .. n_lags-1, of the autocovariance of a process
/// with two-sided spectrum `spectrum` (same convention as above), computed by
/// FFT over one aliasing period on `grid_size` points. Spectra decaying as
/// 1/nu^2 have their remote aliases summed in closed form.
std::vector<std::complex<double>> autocovariance_from_spectrum(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& spectrum,
    double dt, std::size_t n_lags, std::size_t grid_size = 1u << 18, int aliases = 16);

/// E[P(nu_k)] of the single-segment periodogram for the given window and
/// autocovariance lags c(0..L-1) (c(-k) = conj c(k)), ascending frequency.
std::vector<double> expected_periodogram(const std::vector<double>& window,
                                         const std::vector<std::complex<double>>& autocov,
                                         double dt);

}  // namespace eitnoise
