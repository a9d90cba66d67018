#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fttgru/data/cmapss.hpp"
#include "fttgru/error.hpp"
#include "fttgru/tensor.hpp"

namespace fttgru::data {

/// Windows [B, W, 24] with RUL targets [B]. `starts` holds the first row of
/// each window within its engine; negative values mean left padding.
struct WindowBatch {
    Tensor x;
    Tensor y;
    std::vector<int> engine_ids;
    std::vector<long> starts;

    std::size_t size() const noexcept { return engine_ids.size(); }

    /// Rows `indices` gathered into a new batch, in the given order.
    WindowBatch gather(const std::vector<std::size_t>& indices) const {
        const std::size_t block = x.size() / size();
        WindowBatch out;
        out.x = Tensor({indices.size(), x.dim(1), x.dim(2)});
        out.y = Tensor({indices.size()});
        for (std::size_t i = 0; i < indices.size(); ++i) {
            const std::size_t src = indices[i];
            std::copy_n(x.data().begin() + src * block, block, out.x.data().begin() + i * block);
            out.y[i] = y[src];
            out.engine_ids.push_back(engine_ids[src]);
            out.starts.push_back(starts[src]);
        }
        return out;
    }
};

struct WindowSpec {
    std::size_t length = 30;
    double overlap = 0.5;

    std::size_t stride() const {
        validate();
        const auto s = static_cast<std::size_t>(std::floor(static_cast<double>(length) * (1.0 - overlap)));
        return s == 0 ? 1 : s;
    }

    void validate() const {
        if (length == 0) {
            throw ConfigError("window length must be positive");
        }
        if (!(overlap >= 0.0 && overlap < 1.0)) {
            throw ConfigError("window overlap must lie in [0, 1)");
        }
    }
};

/// Window start rows for a series of length L: 0, s, 2s, ... and a final
/// window flush with the end. A series shorter than W gives the single start L - W.
inline std::vector<long> window_starts(std::size_t length, const WindowSpec& spec) {
    const std::size_t w = spec.length;
    const std::size_t stride = spec.stride();
    if (length == 0) {
        return {};
    }
    if (length <= w) {
        return {static_cast<long>(length) - static_cast<long>(w)};
    }
    std::vector<long> out;
    const std::size_t last = length - w;
    for (std::size_t s = 0; s <= last; s += stride) {
        out.push_back(static_cast<long>(s));
    }
    if (out.back() != static_cast<long>(last)) {
        out.push_back(static_cast<long>(last));
    }
    return out;
}

namespace detail {

/// Copies the W rows starting at `start` into dst, repeating row 0 for negative indices.
inline void copy_window(const EngineSeries& e, long start, std::size_t w, double* dst) {
    for (std::size_t i = 0; i < w; ++i) {
        const long t = std::max(0L, start + static_cast<long>(i));
        const FeatureRow row = e.features(static_cast<std::size_t>(t));
        std::copy(row.begin(), row.end(), dst + i * kFeatures);
    }
}

} // namespace detail

/// Training windows over normalized run-to-failure engines, labelled with the RUL
/// at each window's last row.
inline WindowBatch make_train_windows(const std::vector<EngineSeries>& engines, const WindowSpec& spec = {},
                                      std::optional<int> cap = std::nullopt) {
    spec.validate();
    std::vector<std::pair<std::size_t, long>> refs;
    for (std::size_t i = 0; i < engines.size(); ++i) {
        for (long s : window_starts(engines[i].length(), spec)) {
            refs.emplace_back(i, s);
        }
    }
    if (refs.empty()) {
        throw ShapeError("make_train_windows: no windows (no engines with data)");
    }
    const std::size_t w = spec.length;
    WindowBatch out;
    out.x = Tensor({refs.size(), w, kFeatures});
    out.y = Tensor({refs.size()});
    std::vector<std::vector<double>> labels(engines.size());
    for (std::size_t b = 0; b < refs.size(); ++b) {
        const auto [i, start] = refs[b];
        if (labels[i].empty()) {
            labels[i] = label_rul(engines[i], cap);
        }
        detail::copy_window(engines[i], start, w, out.x.data().data() + b * w * kFeatures);
        out.y[b] = labels[i][static_cast<std::size_t>(start + static_cast<long>(w) - 1)];
        out.engine_ids.push_back(engines[i].unit_id);
        out.starts.push_back(start);
    }
    return out;
}

/// One window per test engine (its last W rows) with targets from the ground-truth file.
inline WindowBatch make_test_windows(const std::vector<EngineSeries>& engines, const std::vector<double>& rul,
                                     const WindowSpec& spec = {}) {
    spec.validate();
    if (engines.size() != rul.size()) {
        throw ShapeError("make_test_windows: " + std::to_string(engines.size()) + " engines but " +
                         std::to_string(rul.size()) + " ground-truth values");
    }
    if (engines.empty()) {
        throw ShapeError("make_test_windows: no engines");
    }
    const std::size_t w = spec.length;
    WindowBatch out;
    out.x = Tensor({engines.size(), w, kFeatures});
    out.y = Tensor({engines.size()});
    for (std::size_t b = 0; b < engines.size(); ++b) {
        const auto& e = engines[b];
        if (e.length() == 0) {
            throw ShapeError("make_test_windows: engine " + std::to_string(e.unit_id) + " has no rows");
        }
        const long start = static_cast<long>(e.length()) - static_cast<long>(w);
        detail::copy_window(e, start, w, out.x.data().data() + b * w * kFeatures);
        out.y[b] = rul[b];
        out.engine_ids.push_back(e.unit_id);
        out.starts.push_back(start);
    }
    return out;
}

/// Holds out the last `fraction` of engines by unit id: (train, validation).
/// A non-zero fraction keeps at least one engine on each side when there are two or more.
inline std::pair<std::vector<EngineSeries>, std::vector<EngineSeries>>
split_validation(std::vector<EngineSeries> engines, double fraction) {
    if (!(fraction >= 0.0 && fraction < 1.0)) {
        throw ConfigError("validation fraction must lie in [0, 1)");
    }
    std::sort(engines.begin(), engines.end(),
              [](const EngineSeries& a, const EngineSeries& b) { return a.unit_id < b.unit_id; });
    const std::size_t n = engines.size();
    std::size_t n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
    if (fraction > 0.0 && n >= 2) {
        n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
    } else if (n < 2) {
        n_val = 0;
    }
    std::vector<EngineSeries> val(std::make_move_iterator(engines.end() - static_cast<long>(n_val)),
                                  std::make_move_iterator(engines.end()));
    engines.resize(n - n_val);
    return {std::move(engines), std::move(val)};
}

} // namespace fttgru::data
