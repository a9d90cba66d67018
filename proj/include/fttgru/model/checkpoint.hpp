#pragma once

// Binary checkpoint container (little-endian):
//
//   "FTTGRUCK"                 8-byte magic
//   u32 version                currently 1
//   u32 length, bytes          ModelConfig as key=value lines
//   u64 seed
//   u32 count                  number of parameters, then per parameter:
//     u32 length, bytes        name
//     u32 rank, u64 dims[rank]
//     f64 values[prod(dims)]   row-major

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "fttgru/error.hpp"
#include "fttgru/model/ftt_gru.hpp"

namespace fttgru::model {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

inline constexpr char kCheckpointMagic[8] = {'F', 'T', 'T', 'G', 'R', 'U', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

template <typename T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

class Reader {
public:
    Reader(std::string bytes, std::string path) : bytes_(std::move(bytes)), path_(std::move(path)) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    std::string str(std::size_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw IoError(path_, "truncated checkpoint");
    }

    std::string bytes_;
    std::string path_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline std::string encode_checkpoint(const FttGru& model) {
    std::string out(kCheckpointMagic, sizeof(kCheckpointMagic));
    detail::put(out, kCheckpointVersion);
    const std::string cfg = model.config().serialize();
    detail::put(out, static_cast<std::uint32_t>(cfg.size()));
    out += cfg;
    detail::put(out, model.seed());
    const auto params = model.parameters();
    detail::put(out, static_cast<std::uint32_t>(params.size()));
    for (const auto* p : params) {
        detail::put(out, static_cast<std::uint32_t>(p->name.size()));
        out += p->name;
        detail::put(out, static_cast<std::uint32_t>(p->value.rank()));
        for (std::size_t d : p->value.shape()) {
            detail::put(out, static_cast<std::uint64_t>(d));
        }
        for (double v : p->value.data()) {
            detail::put(out, v);
        }
    }
    return out;
}

inline FttGru decode_checkpoint(std::string bytes, const std::string& path = "<memory>") {
    detail::Reader in(std::move(bytes), path);
    if (in.str(sizeof(kCheckpointMagic)) != std::string(kCheckpointMagic, sizeof(kCheckpointMagic))) {
        throw IoError(path, "not a checkpoint file");
    }
    const auto version = in.get<std::uint32_t>();
    if (version != kCheckpointVersion) {
        throw IoError(path, "unsupported checkpoint version " + std::to_string(version));
    }
    const ModelConfig cfg = ModelConfig::deserialize(in.str(in.get<std::uint32_t>()));
    const auto seed = in.get<std::uint64_t>();
    FttGru model = FttGru::build(cfg, seed);
    auto params = model.parameters();
    const auto count = in.get<std::uint32_t>();
    if (count != params.size()) {
        throw IoError(path, "checkpoint holds " + std::to_string(count) + " parameters, model expects " +
                                std::to_string(params.size()));
    }
    for (auto* p : params) {
        const std::string name = in.str(in.get<std::uint32_t>());
        if (name != p->name) throw IoError(path, "parameter '" + name + "' where '" + p->name + "' was expected");
        Shape shape(in.get<std::uint32_t>());
        for (auto& d : shape) d = static_cast<std::size_t>(in.get<std::uint64_t>());
        if (shape != p->value.shape()) throw IoError(path, "shape mismatch for parameter '" + name + "'");
        for (double& v : p->value.data()) v = in.get<double>();
    }
    if (!in.done()) throw IoError(path, "trailing bytes in checkpoint");
    return model;
}

inline void save_checkpoint(const FttGru& model, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(path, "cannot open checkpoint for writing");
    const std::string bytes = encode_checkpoint(model);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError(path, "failed writing checkpoint");
}

inline FttGru load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError(path, "cannot open checkpoint");
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_checkpoint(std::move(bytes), path);
}

} // namespace fttgru::model
