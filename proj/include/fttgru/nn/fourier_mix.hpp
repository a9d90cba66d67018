#pragma once

// Token mixing along the time axis in the frequency domain.
//
// Channels are split into `heads` contiguous groups. Each channel's length-T
// series is taken to the rFFT domain, multiplied bin-wise by its head's
// learnable complex filter, and brought back with the inverse rFFT. A dense
// D->D projection follows. For a real length-N signal the composite map is
//
//     y_n = (1/N) sum_k w_k Re(g_k X_k e^{+2 pi i k n / N}),
//
// with w_k = 1 for the DC bin (and the Nyquist bin when N is even), 2 otherwise.
// Its gradients are
//
//     dL/dg_k = (w_k / N) conj(X_k) D_k     (D = rfft of the upstream gradient)
//     dL/dx   = irfft(conj(g) * D).

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "fttgru/fft.hpp"
#include "fttgru/nn/dense.hpp"
#include "fttgru/nn/parameter.hpp"
#include "fttgru/tensor.hpp"

namespace fttgru::nn {

enum class MixMode {
    spectral,  // learnable per-head complex filters
    fnet,      // Re(FFT) along time, nothing learnable before the projection
    identity,  // no token mixing; reference path for tests
};

struct FourierMixCache {
    const void* owner = nullptr;
    Shape input_shape;
    std::vector<double> spec_re;  // [B, bins, D] input spectra (spectral mode)
    std::vector<double> spec_im;
    DenseCache projection;
};

class FourierMix {
public:
    FourierMix() = default;

    FourierMix(std::string name, std::size_t steps, std::size_t width, std::size_t heads, MixMode mode)
        : mode_(mode), steps_(steps), width_(width), heads_(heads),
          plan_(std::make_shared<FftPlan>(steps)), projection(name + ".proj", width, width) {
        if (heads == 0 || width % heads != 0) {
            throw ShapeError(name + ": width " + std::to_string(width) + " is not divisible by " +
                             std::to_string(heads) + " heads");
        }
        if (mode_ == MixMode::spectral) {
            filters = Parameter(name + ".filters", Tensor({heads, plan_->bins(), 2}));
            reset_filters();
        }
    }

    void init(Rng& rng) {
        projection.init(rng);
        if (mode_ == MixMode::spectral) {
            reset_filters();
        }
    }

    /// Sets every filter bin to 1+0i, which makes the mixing step the identity.
    void reset_filters() {
        for (std::size_t i = 0; i < filters.value.size(); i += 2) {
            filters.value[i] = 1.0;
            filters.value[i + 1] = 0.0;
        }
    }

    MixMode mode() const noexcept { return mode_; }
    std::size_t heads() const noexcept { return heads_; }
    std::size_t bins() const { return plan_->bins(); }

    cplx filter(std::size_t head, std::size_t bin) const {
        const std::size_t i = (head * bins() + bin) * 2;
        return {filters.value[i], filters.value[i + 1]};
    }

    /// Token mixing without the output projection. Optionally keeps the input
    /// spectra, which the filter gradient needs.
    Tensor mix(const Tensor& x, FourierMixCache* keep = nullptr) const {
        check_input(x);
        if (mode_ == MixMode::identity) {
            return x;
        }
        const std::size_t batch = x.dim(0);
        const std::size_t block = steps_ * width_;
        const std::size_t spec_block = bins() * width_;
        Tensor out(x.shape());
        Scratch scratch(*this);
        std::vector<double> local_re, local_im;
        std::vector<double>& sre = keep ? keep->spec_re : local_re;
        std::vector<double>& sim = keep ? keep->spec_im : local_im;
        sre.assign(keep ? batch * spec_block : spec_block, 0.0);
        sim.assign(sre.size(), 0.0);
        for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t off = keep ? b * spec_block : 0;
            double* r = sre.data() + off;
            double* i = sim.data() + off;
            analyze(x.data().data() + b * block, r, i, scratch);
            if (mode_ == MixMode::fnet) {
                real_of_full(r, out.data().data() + b * block);
            } else {
                std::vector<double>& fr = scratch.filtered_re;
                std::vector<double>& fi = scratch.filtered_im;
                apply_filter(r, i, fr.data(), fi.data(), false);
                synthesize(fr.data(), fi.data(), out.data().data() + b * block, scratch);
            }
        }
        return out;
    }

    Tensor forward(const Tensor& x, FourierMixCache& cache) const {
        cache.owner = this;
        cache.input_shape = x.shape();
        const Tensor mixed = mix(x, mode_ == MixMode::spectral ? &cache : nullptr);
        return projection.forward(mixed, cache.projection);
    }

    Tensor apply(const Tensor& x) const { return projection.apply(mix(x)); }

    Tensor backward(const Tensor& dy, FourierMixCache& cache) {
        if (cache.owner != this) {
            throw ShapeError(projection.weight.name + ": backward called with a cache from another layer");
        }
        dy.require_shape(cache.input_shape, projection.weight.name + " backward");
        Tensor dmixed = projection.backward(dy, cache.projection);
        if (mode_ == MixMode::identity) {
            return dmixed;
        }
        const std::size_t batch = dy.dim(0);
        const std::size_t block = steps_ * width_;
        const std::size_t spec_block = bins() * width_;
        Tensor dx(dy.shape());
        Scratch scratch(*this);
        std::vector<double> dre(spec_block), dim(spec_block);
        for (std::size_t b = 0; b < batch; ++b) {
            analyze(dmixed.data().data() + b * block, dre.data(), dim.data(), scratch);
            if (mode_ == MixMode::fnet) {
                // Re(FFT) along time is a symmetric cosine transform, hence self-adjoint.
                real_of_full(dre.data(), dx.data().data() + b * block);
                continue;
            }
            accumulate_filter_grad(cache.spec_re.data() + b * spec_block, cache.spec_im.data() + b * spec_block,
                                   dre.data(), dim.data());
            apply_filter(dre.data(), dim.data(), scratch.filtered_re.data(), scratch.filtered_im.data(), true);
            synthesize(scratch.filtered_re.data(), scratch.filtered_im.data(), dx.data().data() + b * block,
                       scratch);
        }
        return dx;
    }

    void collect(ParameterRefs& out) {
        if (mode_ == MixMode::spectral) {
            out.push_back(&filters);
        }
        projection.collect(out);
    }

private:
    // Real channels are packed in pairs (c, c + half) into one complex lane,
    // so a window of D channels needs ceil(D/2) complex transforms.
    struct Scratch {
        explicit Scratch(const FourierMix& m)
            : lanes((m.width_ + 1) / 2), re(m.steps_ * lanes), im(m.steps_ * lanes),
              filtered_re(m.bins() * m.width_), filtered_im(m.bins() * m.width_) {}
        std::size_t lanes;
        std::vector<double> re, im;
        std::vector<double> filtered_re, filtered_im;
        FftWorkspace ws;
    };

    void check_input(const Tensor& x) const {
        if (x.rank() != 3 || x.dim(1) != steps_ || x.dim(2) != width_) {
            throw ShapeError(projection.weight.name + ": expected [B," + std::to_string(steps_) + "," +
                             std::to_string(width_) + "], got " + shape_string(x.shape()));
        }
    }

    /// Half spectra [bins, D] of every channel of one [T, D] window.
    void analyze(const double* window, double* spec_re, double* spec_im, Scratch& s) const {
        const std::size_t lanes = s.lanes;
        for (std::size_t t = 0; t < steps_; ++t) {
            const double* row = window + t * width_;
            for (std::size_t j = 0; j < lanes; ++j) {
                s.re[t * lanes + j] = row[j];
                s.im[t * lanes + j] = j + lanes < width_ ? row[j + lanes] : 0.0;
            }
        }
        plan_->forward_lanes(s.re.data(), s.im.data(), lanes, s.ws);
        for (std::size_t k = 0; k < bins(); ++k) {
            const std::size_t mirror = (steps_ - k) % steps_;
            const double* zr = s.re.data() + k * lanes;
            const double* zi = s.im.data() + k * lanes;
            const double* mr = s.re.data() + mirror * lanes;
            const double* mi = s.im.data() + mirror * lanes;
            double* out_r = spec_re + k * width_;
            double* out_i = spec_im + k * width_;
            for (std::size_t j = 0; j < lanes; ++j) {
                out_r[j] = 0.5 * (zr[j] + mr[j]);
                out_i[j] = 0.5 * (zi[j] - mi[j]);
                if (j + lanes < width_) {
                    out_r[j + lanes] = 0.5 * (zi[j] + mi[j]);
                    out_i[j + lanes] = -0.5 * (zr[j] - mr[j]);
                }
            }
        }
    }

    /// Real [T, D] window from half spectra [bins, D]. Imaginary parts of the
    /// DC and Nyquist bins are dropped, as for any real signal.
    void synthesize(const double* spec_re, const double* spec_im, double* window, Scratch& s) const {
        const std::size_t lanes = s.lanes;
        const std::size_t nb = bins();
        for (std::size_t k = 0; k < steps_; ++k) {
            const bool direct = k < nb;
            const std::size_t src = direct ? k : steps_ - k;
            const bool edge = src == 0 || (steps_ % 2 == 0 && src == steps_ / 2);
            const double sign = direct ? 1.0 : -1.0;
            const double* ar = spec_re + src * width_;
            const double* ai = spec_im + src * width_;
            double* zr = s.re.data() + k * lanes;
            double* zi = s.im.data() + k * lanes;
            for (std::size_t j = 0; j < lanes; ++j) {
                const double a_re = ar[j];
                const double a_im = edge ? 0.0 : sign * ai[j];
                const bool has_b = j + lanes < width_;
                const double b_re = has_b ? ar[j + lanes] : 0.0;
                const double b_im = has_b && !edge ? sign * ai[j + lanes] : 0.0;
                zr[j] = a_re - b_im;
                zi[j] = a_im + b_re;
            }
        }
        plan_->inverse_lanes(s.re.data(), s.im.data(), lanes, s.ws);
        for (std::size_t t = 0; t < steps_; ++t) {
            double* row = window + t * width_;
            for (std::size_t j = 0; j < lanes; ++j) {
                row[j] = s.re[t * lanes + j];
                if (j + lanes < width_) {
                    row[j + lanes] = s.im[t * lanes + j];
                }
            }
        }
    }

    void apply_filter(const double* in_re, const double* in_im, double* out_re, double* out_im,
                      bool conjugate) const {
        const std::size_t group = width_ / heads_;
        const double sign = conjugate ? -1.0 : 1.0;
        for (std::size_t k = 0; k < bins(); ++k) {
            for (std::size_t c = 0; c < width_; ++c) {
                const cplx g = filter(c / group, k);
                const double gr = g.real(), gi = sign * g.imag();
                const std::size_t i = k * width_ + c;
                out_re[i] = in_re[i] * gr - in_im[i] * gi;
                out_im[i] = in_re[i] * gi + in_im[i] * gr;
            }
        }
    }

    /// dL/dg_k += (w_k / N) conj(X_k) D_k summed over the head's channels.
    void accumulate_filter_grad(const double* x_re, const double* x_im, const double* d_re, const double* d_im) {
        const std::size_t group = width_ / heads_;
        const double inv_n = 1.0 / static_cast<double>(steps_);
        for (std::size_t k = 0; k < bins(); ++k) {
            const bool edge = k == 0 || (steps_ % 2 == 0 && k == steps_ / 2);
            const double w = (edge ? 1.0 : 2.0) * inv_n;
            for (std::size_t h = 0; h < heads_; ++h) {
                double acc_re = 0.0, acc_im = 0.0;
                for (std::size_t c = h * group; c < (h + 1) * group; ++c) {
                    const std::size_t i = k * width_ + c;
                    acc_re += x_re[i] * d_re[i] + x_im[i] * d_im[i];
                    acc_im += x_re[i] * d_im[i] - x_im[i] * d_re[i];
                }
                const std::size_t slot = (h * bins() + k) * 2;
                filters.grad[slot] += w * acc_re;
                filters.grad[slot + 1] += w * acc_im;
            }
        }
    }

    /// Re(full FFT)[t] per channel from half spectra: bin t for t < bins, else bin N - t.
    void real_of_full(const double* spec_re, double* window) const {
        for (std::size_t t = 0; t < steps_; ++t) {
            const std::size_t src = t < bins() ? t : steps_ - t;
            std::copy_n(spec_re + src * width_, width_, window + t * width_);
        }
    }

    MixMode mode_ = MixMode::spectral;
    std::size_t steps_ = 0;
    std::size_t width_ = 0;
    std::size_t heads_ = 1;
    std::shared_ptr<const FftPlan> plan_;

public:
    Parameter filters;  // [heads, bins, 2] as (re, im); empty unless spectral
    Dense projection;
};

} // namespace fttgru::nn
