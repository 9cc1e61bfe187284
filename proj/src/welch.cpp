#include "welch.hpp"

#include "error.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>

namespace eitnoise {

namespace {

using cplx = std::complex<double>;

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (data == nullptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    cplx* c() { return reinterpret_cast<cplx*>(data); }
    fftw_complex* data;
};

// One-shot transform with FFTW_ESTIMATE, so results do not depend on timing.
std::vector<cplx> transform(const std::vector<cplx>& in, int sign) {
    const std::size_t n = in.size();
    FftwBuffer a(n), b(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), a.data, b.data, sign, FFTW_ESTIMATE);
    std::copy(in.begin(), in.end(), a.c());
    fftw_execute(p);
    fftw_destroy_plan(p);
    return std::vector<cplx>(b.c(), b.c() + n);
}

std::size_t ascending_to_fft(std::size_t j, std::size_t n) { return (j + n - n / 2) % n; }

// Asymptotic trigamma, accurate to ~1e-9 relative for x >= 10.
double trigamma_large(double x) {
    const double x2 = x * x;
    return 1.0 / x + 1.0 / (2.0 * x2) + 1.0 / (6.0 * x2 * x) - 1.0 / (30.0 * x2 * x2 * x) +
           1.0 / (42.0 * x2 * x2 * x2 * x);
}

}  // namespace

std::vector<double> make_window(WindowKind kind, std::size_t length) {
    std::vector<double> w(length, 1.0);
    if (kind == WindowKind::Hann) {
        // Periodic Hann, the usual choice for spectral estimation.
        for (std::size_t n = 0; n < length; ++n) {
            w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(n) / double(length));
        }
    }
    return w;
}

std::string window_name(WindowKind kind) {
    return kind == WindowKind::Hann ? "hann" : "rectangular";
}

WindowKind window_from_name(const std::string& name) {
    if (name == "hann") return WindowKind::Hann;
    if (name == "rectangular" || name == "boxcar") return WindowKind::Rectangular;
    throw Error(ErrorCode::Config, "welch.window: unknown window '" + name + "'");
}

struct WelchEstimator::Plan {
    fftw_plan plan = nullptr;
    ~Plan() {
        if (plan != nullptr) fftw_destroy_plan(plan);
    }
};

WelchEstimator::WelchEstimator(std::size_t segment_length, double overlap, WindowKind window,
                               double dt)
    : length_(segment_length), dt_(dt), window_(make_window(window, segment_length)),
      plan_(std::make_unique<Plan>()) {
    if (segment_length < 2) throw Error(ErrorCode::Config, "welch.segment_length must be >= 2");
    if (!(overlap >= 0.0 && overlap < 1.0)) {
        throw Error(ErrorCode::Config, "welch.overlap must lie in [0, 1)");
    }
    hop_ = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(double(segment_length) * (1.0 - overlap))));
    for (double v : window_) window_power_ += v * v;

    FftwBuffer in(length_), out(length_);
    plan_->plan = fftw_plan_dft_1d(static_cast<int>(length_), in.data, out.data, FFTW_BACKWARD,
                                   FFTW_ESTIMATE);
}

WelchEstimator::~WelchEstimator() = default;

std::size_t WelchEstimator::segment_count(std::size_t n_samples) const {
    if (n_samples < length_) return 0;
    return (n_samples - length_) / hop_ + 1;
}

std::vector<double> WelchEstimator::frequencies() const {
    std::vector<double> nu(length_);
    const double step = 2.0 * std::numbers::pi / (double(length_) * dt_);
    for (std::size_t j = 0; j < length_; ++j) {
        nu[j] = (double(j) - double(length_ / 2)) * step;
    }
    return nu;
}

void WelchEstimator::estimate(const cplx* x, std::size_t n_samples, double* psd) const {
    const std::size_t segments = segment_count(n_samples);
    if (segments == 0) throw Error(ErrorCode::Config, "time series shorter than one segment");

    FftwBuffer in(length_), out(length_);
    std::vector<double> acc(length_, 0.0);
    for (std::size_t s = 0; s < segments; ++s) {
        const cplx* seg = x + s * hop_;
        for (std::size_t n = 0; n < length_; ++n) in.c()[n] = window_[n] * seg[n];
        fftw_execute_dft(plan_->plan, in.data, out.data);
        for (std::size_t k = 0; k < length_; ++k) acc[k] += std::norm(out.c()[k]);
    }
    const double scale = dt_ / (2.0 * std::numbers::pi * window_power_ * double(segments));
    for (std::size_t j = 0; j < length_; ++j) psd[j] = scale * acc[ascending_to_fft(j, length_)];
}

std::vector<cplx> autocovariance_from_spectrum(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& spectrum,
    double dt, std::size_t n_lags, std::size_t grid_size, int aliases) {
    if (n_lags > grid_size) throw Error(ErrorCode::InvalidArgument, "n_lags exceeds grid size");
    const double period = 2.0 * std::numbers::pi / dt;
    const double dnu = period / double(grid_size);

    std::vector<double> base(grid_size);
    for (std::size_t j = 0; j < grid_size; ++j) {
        base[j] = (double(j) - double(grid_size / 2)) * dnu;
    }

    std::vector<double> folded(grid_size, 0.0);
    std::vector<double> shifted(grid_size), values(grid_size);
    for (int m = -aliases; m <= aliases; ++m) {
        for (std::size_t j = 0; j < grid_size; ++j) shifted[j] = base[j] + m * period;
        spectrum(shifted, values);
        for (std::size_t j = 0; j < grid_size; ++j) folded[j] += values[j];
    }

    // Remaining aliases from the 1/nu^2 tail K/nu^2, K read off at the edges.
    const double edge = (aliases + 1) * period;
    std::vector<double> probe = {-edge, edge}, tail(2);
    spectrum(probe, tail);
    const double k_neg = tail[0] * edge * edge;
    const double k_pos = tail[1] * edge * edge;
    const double x0 = aliases + 1.0;
    for (std::size_t j = 0; j < grid_size; ++j) {
        const double u = base[j] / period;
        folded[j] += (k_pos * trigamma_large(x0 + u) + k_neg * trigamma_large(x0 - u)) /
                     (period * period);
    }

    // c(k) = dnu sum_j S_j exp(-i nu_j k dt), with nu_j k dt = 2 pi (j - N/2) k / N.
    std::vector<cplx> in(grid_size);
    for (std::size_t j = 0; j < grid_size; ++j) in[j] = folded[j];
    const std::vector<cplx> out = transform(in, FFTW_FORWARD);
    std::vector<cplx> c(n_lags);
    const double phase = 2.0 * std::numbers::pi * double(grid_size / 2) / double(grid_size);
    for (std::size_t k = 0; k < n_lags; ++k) {
        c[k] = dnu * out[k] * std::polar(1.0, phase * double(k));
    }
    return c;
}

std::vector<double> expected_periodogram(const std::vector<double>& window,
                                         const std::vector<cplx>& autocov, double dt) {
    const std::size_t len = window.size();
    if (autocov.size() < len) {
        throw Error(ErrorCode::InvalidArgument, "need autocovariance lags up to segment length");
    }
    const std::size_t n2 = 2 * len;

    // Window autocorrelation rho(tau) = sum_n w_n w_{n+tau} via a padded FFT.
    std::vector<cplx> wpad(n2, 0.0);
    for (std::size_t n = 0; n < len; ++n) wpad[n] = window[n];
    std::vector<cplx> wf = transform(wpad, FFTW_FORWARD);
    for (cplx& v : wf) v = std::norm(v);
    std::vector<cplx> rho = transform(wf, FFTW_BACKWARD);
    double power = 0.0;
    for (double v : window) power += v * v;

    std::vector<cplx> a(n2, 0.0);
    for (std::size_t tau = 0; tau < len; ++tau) {
        const double r = rho[tau].real() / double(n2);
        a[tau] = autocov[tau] * r;
        if (tau > 0) a[n2 - tau] = std::conj(autocov[tau]) * r;
    }
    const std::vector<cplx> spec = transform(a, FFTW_BACKWARD);

    std::vector<double> out(len);
    const double scale = dt / (2.0 * std::numbers::pi * power);
    for (std::size_t j = 0; j < len; ++j) {
        out[j] = scale * spec[2 * ascending_to_fft(j, len)].real();
    }
    return out;
}

}  // namespace eitnoise
