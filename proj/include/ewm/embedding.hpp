#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace ewm {

// Dense row-major float tensor as stored in the embedding file format:
// magic "EWMB", u32 version = 1, u32 rank, rank x u64 dims, then f32 data,
// all little-endian.
struct Tensor {
    std::vector<std::uint64_t> dims;
    std::vector<float> data;

    std::size_t element_count() const {
        std::size_t n = 1;
        for (auto d : dims) n *= static_cast<std::size_t>(d);
        return n;
    }
};

namespace detail {

template <typename T>
void read_le(std::istream& in, T& out, const std::string& path) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T)))
        throw std::runtime_error(path + ": truncated embedding file");
    T v = 0;
    // assemble little-endian regardless of host order
    if constexpr (sizeof(T) == 4) {
        std::uint32_t u = std::uint32_t(buf[0]) | std::uint32_t(buf[1]) << 8 |
                          std::uint32_t(buf[2]) << 16 | std::uint32_t(buf[3]) << 24;
        std::memcpy(&v, &u, 4);
    } else {
        std::uint64_t u = 0;
        for (int i = 7; i >= 0; --i) u = (u << 8) | buf[i];
        std::memcpy(&v, &u, 8);
    }
    out = v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
    unsigned char buf[sizeof(T)];
    if constexpr (sizeof(T) == 4) {
        std::uint32_t u;
        std::memcpy(&u, &v, 4);
        for (int i = 0; i < 4; ++i) buf[i] = (u >> (8 * i)) & 0xff;
    } else {
        std::uint64_t u;
        std::memcpy(&u, &v, 8);
        for (int i = 0; i < 8; ++i) buf[i] = (u >> (8 * i)) & 0xff;
    }
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

}  // namespace detail

inline Tensor load_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open embedding file");
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "EWMB", 4) != 0)
        throw std::runtime_error(path + ": bad magic (expected EWMB)");
    std::uint32_t version = 0, rank = 0;
    detail::read_le(in, version, path);
    if (version != 1) throw std::runtime_error(path + ": unsupported version");
    detail::read_le(in, rank, path);
    if (rank == 0 || rank > 4) throw std::runtime_error(path + ": bad rank");
    Tensor t;
    t.dims.resize(rank);
    for (auto& d : t.dims) detail::read_le(in, d, path);
    std::size_t n = t.element_count();
    t.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits;
        detail::read_le(in, bits, path);
        float f;
        std::memcpy(&f, &bits, 4);
        t.data[i] = f;
    }
    for (float f : t.data)
        if (!std::isfinite(f)) throw std::runtime_error(path + ": non-finite embedding value");
    return t;
}

inline void save_tensor(const Tensor& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out.write("EWMB", 4);
    detail::write_le(out, std::uint32_t(1));
    detail::write_le(out, std::uint32_t(t.dims.size()));
    for (auto d : t.dims) detail::write_le(out, d);
    for (float f : t.data) detail::write_le(out, f);
}

// Per-frame patch embeddings: T frames x P patches x D dims.
struct PatchEmbeddingSeq {
    std::size_t frames = 0;
    std::size_t patches = 0;
    std::size_t dim = 0;
    std::vector<float> data;  // frames * patches * dim, row-major

    const float* patch(std::size_t t, std::size_t p) const {
        return data.data() + (t * patches + p) * dim;
    }

    static PatchEmbeddingSeq from_tensor(const Tensor& t, const std::string& origin) {
        if (t.dims.size() != 3)
            throw std::runtime_error(origin + ": patch embeddings must be rank 3 (T,P,D)");
        PatchEmbeddingSeq s;
        s.frames = t.dims[0];
        s.patches = t.dims[1];
        s.dim = t.dims[2];
        s.data = t.data;
        if (s.frames == 0 || s.patches == 0 || s.dim == 0)
            throw std::runtime_error(origin + ": empty patch embedding tensor");
        return s;
    }
};

inline PatchEmbeddingSeq load_patch_embeddings(const std::string& path) {
    return PatchEmbeddingSeq::from_tensor(load_tensor(path), path);
}

// One global embedding vector per generated video.
struct GlobalEmbedding {
    std::vector<float> vector;
};

inline GlobalEmbedding load_global_embedding(const std::string& path) {
    Tensor t = load_tensor(path);
    if (t.dims.size() != 1) throw std::runtime_error(path + ": global embedding must be rank 1");
    double norm2 = 0.0;
    for (float f : t.data) norm2 += double(f) * double(f);
    if (norm2 == 0.0) throw std::runtime_error(path + ": zero-norm global embedding");
    return GlobalEmbedding{std::move(t.data)};
}

}  // namespace ewm
