#pragma once

// Discrete Fourier transforms for arbitrary lengths.
//
// Power-of-two lengths use an iterative radix-2 kernel. Every other length
// goes through Bluestein's chirp-z identity, which re-expresses the DFT as a
// circular convolution evaluated with power-of-two transforms.

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fttgru/error.hpp"

namespace fttgru {

using cplx = std::complex<double>;

/// Split-storage complex buffer.
struct ComplexVector {
    std::vector<double> re;
    std::vector<double> im;

    ComplexVector() = default;
    explicit ComplexVector(std::size_t n) : re(n, 0.0), im(n, 0.0) {}
    ComplexVector(std::vector<double> real, std::vector<double> imag)
        : re(std::move(real)), im(std::move(imag)) {
        if (re.size() != im.size()) {
            throw ShapeError("ComplexVector: re/im length mismatch");
        }
    }

    std::size_t size() const noexcept { return re.size(); }
    cplx operator[](std::size_t i) const { return {re[i], im[i]}; }
    void set(std::size_t i, cplx v) {
        re[i] = v.real();
        im[i] = v.imag();
    }

    static ComplexVector from(std::span<const cplx> values) {
        ComplexVector out(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            out.set(i, values[i]);
        }
        return out;
    }
    std::vector<cplx> to_complex() const {
        std::vector<cplx> out(size());
        for (std::size_t i = 0; i < size(); ++i) {
            out[i] = (*this)[i];
        }
        return out;
    }
};

namespace detail {

class Radix2 {
public:
    explicit Radix2(std::size_t n) : n_(n), twiddle_(n / 2), rev_(n) {
        const unsigned bits = static_cast<unsigned>(std::countr_zero(n));
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (unsigned b = 0; b < bits; ++b) {
                r |= ((i >> b) & 1U) << (bits - 1 - b);
            }
            rev_[i] = r;
        }
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            twiddle_[k] = {std::cos(ang), std::sin(ang)};
        }
    }

    std::size_t size() const noexcept { return n_; }

    /// In-place forward transform (negative exponent), unnormalised.
    void forward(std::span<cplx> a) const {
        for (std::size_t i = 0; i < n_; ++i) {
            if (i < rev_[i]) {
                std::swap(a[i], a[rev_[i]]);
            }
        }
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t step = n_ / len;
            for (std::size_t start = 0; start < n_; start += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    const cplx t = twiddle_[j * step] * a[start + j + half];
                    const cplx u = a[start + j];
                    a[start + j] = u + t;
                    a[start + j + half] = u - t;
                }
            }
        }
    }

    /// Forward transform of `lanes` signals stored as rows [n][lanes] in
    /// split re/im arrays. The lane loop is innermost so it vectorises.
    void forward_lanes(double* re, double* im, std::size_t lanes) const {
        for (std::size_t i = 0; i < n_; ++i) {
            if (i < rev_[i]) {
                std::swap_ranges(re + i * lanes, re + (i + 1) * lanes, re + rev_[i] * lanes);
                std::swap_ranges(im + i * lanes, im + (i + 1) * lanes, im + rev_[i] * lanes);
            }
        }
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t step = n_ / len;
            for (std::size_t start = 0; start < n_; start += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    const double wr = twiddle_[j * step].real();
                    const double wi = twiddle_[j * step].imag();
                    double* ar = re + (start + j) * lanes;
                    double* ai = im + (start + j) * lanes;
                    double* br = re + (start + j + half) * lanes;
                    double* bi = im + (start + j + half) * lanes;
                    for (std::size_t l = 0; l < lanes; ++l) {
                        const double tr = wr * br[l] - wi * bi[l];
                        const double ti = wr * bi[l] + wi * br[l];
                        br[l] = ar[l] - tr;
                        bi[l] = ai[l] - ti;
                        ar[l] += tr;
                        ai[l] += ti;
                    }
                }
            }
        }
    }

    /// In-place inverse (positive exponent), unnormalised.
    void backward(std::span<cplx> a) const {
        for (auto& v : a) {
            v = std::conj(v);
        }
        forward(a);
        for (auto& v : a) {
            v = std::conj(v);
        }
    }

private:
    std::size_t n_;
    std::vector<cplx> twiddle_;
    std::vector<std::size_t> rev_;
};

} // namespace detail

/// Scratch space for the multi-lane transforms, reusable across calls.
struct FftWorkspace {
    std::vector<double> re;
    std::vector<double> im;
};

/// Precomputed tables for transforms of one fixed length.
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        if (n == 0) {
            throw ShapeError("FFT length must be at least 1");
        }
        if (std::has_single_bit(n)) {
            radix2_ = std::make_unique<detail::Radix2>(n);
            return;
        }
        const std::size_t m = std::bit_ceil(2 * n - 1);
        radix2_ = std::make_unique<detail::Radix2>(m);
        chirp_.resize(n);
        // n^2 mod 2n keeps the chirp argument small, so large n stays accurate.
        const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t sq = (static_cast<std::uint64_t>(i) * i) % two_n;
            const double ang = -std::numbers::pi * static_cast<double>(sq) / static_cast<double>(n);
            chirp_[i] = {std::cos(ang), std::sin(ang)};
        }
        kernel_.assign(m, cplx{});
        kernel_[0] = std::conj(chirp_[0]);
        for (std::size_t i = 1; i < n; ++i) {
            kernel_[i] = std::conj(chirp_[i]);
            kernel_[m - i] = std::conj(chirp_[i]);
        }
        radix2_->forward(kernel_);
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t bins() const noexcept { return n_ / 2 + 1; }

    /// X_k = sum_n x_n exp(-2 pi i k n / N), in place.
    void forward(std::span<cplx> x) const {
        check(x.size());
        if (chirp_.empty()) {
            radix2_->forward(x);
            return;
        }
        const std::size_t m = radix2_->size();
        std::vector<cplx> work(m);
        for (std::size_t i = 0; i < n_; ++i) {
            work[i] = x[i] * chirp_[i];
        }
        radix2_->forward(work);
        for (std::size_t i = 0; i < m; ++i) {
            work[i] *= kernel_[i];
        }
        radix2_->backward(work);
        const double scale = 1.0 / static_cast<double>(m);
        for (std::size_t k = 0; k < n_; ++k) {
            x[k] = work[k] * chirp_[k] * scale;
        }
    }

    /// forward() applied to `lanes` signals stored as rows [N][lanes].
    void forward_lanes(double* re, double* im, std::size_t lanes, FftWorkspace& ws) const {
        if (chirp_.empty()) {
            radix2_->forward_lanes(re, im, lanes);
            return;
        }
        const std::size_t m = radix2_->size();
        ws.re.assign(m * lanes, 0.0);
        ws.im.assign(m * lanes, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            const double cr = chirp_[i].real(), ci = chirp_[i].imag();
            const double* xr = re + i * lanes;
            const double* xi = im + i * lanes;
            double* wr = ws.re.data() + i * lanes;
            double* wi = ws.im.data() + i * lanes;
            for (std::size_t l = 0; l < lanes; ++l) {
                wr[l] = xr[l] * cr - xi[l] * ci;
                wi[l] = xr[l] * ci + xi[l] * cr;
            }
        }
        radix2_->forward_lanes(ws.re.data(), ws.im.data(), lanes);
        // Multiply by the kernel spectrum and conjugate, so the next forward
        // pass computes the (conjugated) inverse transform.
        for (std::size_t i = 0; i < m; ++i) {
            const double kr = kernel_[i].real(), ki = kernel_[i].imag();
            double* wr = ws.re.data() + i * lanes;
            double* wi = ws.im.data() + i * lanes;
            for (std::size_t l = 0; l < lanes; ++l) {
                const double r = wr[l] * kr - wi[l] * ki;
                const double q = wr[l] * ki + wi[l] * kr;
                wr[l] = r;
                wi[l] = -q;
            }
        }
        radix2_->forward_lanes(ws.re.data(), ws.im.data(), lanes);
        const double scale = 1.0 / static_cast<double>(m);
        for (std::size_t k = 0; k < n_; ++k) {
            const double cr = chirp_[k].real() * scale, ci = chirp_[k].imag() * scale;
            const double* wr = ws.re.data() + k * lanes;
            const double* wi = ws.im.data() + k * lanes;
            double* xr = re + k * lanes;
            double* xi = im + k * lanes;
            for (std::size_t l = 0; l < lanes; ++l) {
                // conj(work) * chirp
                xr[l] = wr[l] * cr + wi[l] * ci;
                xi[l] = wr[l] * ci - wi[l] * cr;
            }
        }
    }

    /// inverse() applied to `lanes` signals stored as rows [N][lanes].
    void inverse_lanes(double* re, double* im, std::size_t lanes, FftWorkspace& ws) const {
        const std::size_t total = n_ * lanes;
        for (std::size_t i = 0; i < total; ++i) {
            im[i] = -im[i];
        }
        forward_lanes(re, im, lanes, ws);
        const double scale = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < total; ++i) {
            re[i] *= scale;
            im[i] = -im[i] * scale;
        }
    }

    /// x_n = (1/N) sum_k X_k exp(+2 pi i k n / N), in place.
    void inverse(std::span<cplx> x) const {
        check(x.size());
        for (auto& v : x) {
            v = std::conj(v);
        }
        forward(x);
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& v : x) {
            v = std::conj(v) * scale;
        }
    }

    /// First floor(N/2)+1 bins of the DFT of a real signal.
    void rfft(std::span<const double> x, std::span<cplx> out) const {
        check(x.size());
        if (out.size() != bins()) {
            throw ShapeError("rfft: output must hold " + std::to_string(bins()) + " bins");
        }
        std::vector<cplx> full(x.begin(), x.end());
        forward(full);
        std::copy_n(full.begin(), bins(), out.begin());
    }

    /// Real signal whose half spectrum is `bins`. The imaginary parts of the
    /// DC bin (and of the Nyquist bin for even N) carry no real-signal
    /// content and are dropped.
    void irfft(std::span<const cplx> half, std::span<double> out) const {
        check(out.size());
        if (half.size() != bins()) {
            throw ShapeError("irfft: expected " + std::to_string(bins()) + " bins, got " +
                             std::to_string(half.size()));
        }
        std::vector<cplx> full(n_);
        full[0] = half[0].real();
        for (std::size_t k = 1; k < half.size(); ++k) {
            full[k] = half[k];
            full[n_ - k] = std::conj(half[k]);
        }
        if (n_ % 2 == 0) {
            full[n_ / 2] = half[n_ / 2].real();
        }
        inverse(full);
        for (std::size_t i = 0; i < n_; ++i) {
            out[i] = full[i].real();
        }
    }

    /// rfft of two real signals at once through one complex transform.
    void rfft_pair(std::span<const double> a, std::span<const double> b, std::span<cplx> out_a,
                   std::span<cplx> out_b) const {
        check(a.size());
        check(b.size());
        std::vector<cplx> z(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            z[i] = {a[i], b[i]};
        }
        forward(z);
        for (std::size_t k = 0; k < bins(); ++k) {
            const cplx zk = z[k];
            const cplx zc = std::conj(z[(n_ - k) % n_]);
            out_a[k] = 0.5 * (zk + zc);
            out_b[k] = cplx{0.0, -0.5} * (zk - zc);
        }
    }

    /// irfft of two half spectra at once through one complex transform.
    void irfft_pair(std::span<const cplx> ha, std::span<const cplx> hb, std::span<double> out_a,
                    std::span<double> out_b) const {
        check(out_a.size());
        check(out_b.size());
        std::vector<cplx> full(n_);
        auto hermitian = [&](std::span<const cplx> h, std::size_t k) -> cplx {
            if (k == 0 || (n_ % 2 == 0 && k == n_ / 2)) {
                return h[k].real();
            }
            return k < bins() ? h[k] : std::conj(h[n_ - k]);
        };
        const cplx i_unit{0.0, 1.0};
        for (std::size_t k = 0; k < n_; ++k) {
            full[k] = hermitian(ha, k) + i_unit * hermitian(hb, k);
        }
        inverse(full);
        for (std::size_t i = 0; i < n_; ++i) {
            out_a[i] = full[i].real();
            out_b[i] = full[i].imag();
        }
    }

private:
    void check(std::size_t len) const {
        if (len != n_) {
            throw ShapeError("FFT plan of length " + std::to_string(n_) + " applied to length " +
                             std::to_string(len));
        }
    }

    std::size_t n_;
    std::unique_ptr<detail::Radix2> radix2_;
    std::vector<cplx> chirp_;
    std::vector<cplx> kernel_;
};

inline ComplexVector fft_forward(const ComplexVector& x) {
    if (x.size() == 0) {
        throw ShapeError("fft_forward: empty input");
    }
    auto buf = x.to_complex();
    FftPlan(buf.size()).forward(buf);
    return ComplexVector::from(buf);
}

inline ComplexVector fft_inverse(const ComplexVector& x) {
    if (x.size() == 0) {
        throw ShapeError("fft_inverse: empty input");
    }
    auto buf = x.to_complex();
    FftPlan(buf.size()).inverse(buf);
    return ComplexVector::from(buf);
}

inline ComplexVector rfft(std::span<const double> x) {
    if (x.empty()) {
        throw ShapeError("rfft: empty input");
    }
    const FftPlan plan(x.size());
    std::vector<cplx> out(plan.bins());
    plan.rfft(x, out);
    return ComplexVector::from(out);
}

/// Inverse of rfft for an output of length n.
inline std::vector<double> irfft(const ComplexVector& half, std::size_t n) {
    if (n == 0) {
        throw ShapeError("irfft: empty output");
    }
    const FftPlan plan(n);
    std::vector<double> out(n);
    plan.irfft(half.to_complex(), out);
    return out;
}

} // namespace fttgru
