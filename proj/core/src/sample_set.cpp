#include "dscem/sample_set.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

namespace dscem {
namespace {

constexpr std::uint64_t kMagic = 0x4453434d4c434431ull;  // "DSCMLCD1"
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a64(const unsigned char* data, std::size_t n) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

#pragma pack(push, 1)
struct CacheHeader {
    std::uint64_t magic;
    std::uint32_t version;
    std::uint32_t dim;
    std::uint32_t count;
    std::uint32_t scheme;
    double cvm_score;  // NaN when absent
    std::uint64_t checksum;
};
#pragma pack(pop)

}  // namespace

std::string cache_file_name(const SampleCacheKey& key) {
    return "lcd_d" + std::to_string(key.dim) + "_n" + std::to_string(key.count) + ".dsc";
}

void save_cache(const SampleSet& set, const std::string& path) {
    if (!set.valid()) throw std::invalid_argument("save_cache: invalid sample set");

    // Row-major payload, independent of Eigen's storage order.
    std::vector<double> payload(static_cast<std::size_t>(set.count) * set.dim);
    for (int i = 0; i < set.count; ++i)
        for (int j = 0; j < set.dim; ++j)
            payload[static_cast<std::size_t>(i) * set.dim + j] = set.points(i, j);

    CacheHeader h{};
    h.magic = kMagic;
    h.version = kVersion;
    h.dim = static_cast<std::uint32_t>(set.dim);
    h.count = static_cast<std::uint32_t>(set.count);
    h.scheme = static_cast<std::uint32_t>(set.scheme);
    h.cvm_score = set.cvm_score ? *set.cvm_score : std::numeric_limits<double>::quiet_NaN();
    h.checksum = fnv1a64(reinterpret_cast<const unsigned char*>(payload.data()),
                         payload.size() * sizeof(double));

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("save_cache: cannot open " + tmp);
        out.write(reinterpret_cast<const char*>(&h), sizeof(h));
        out.write(reinterpret_cast<const char*>(payload.data()),
                  static_cast<std::streamsize>(payload.size() * sizeof(double)));
        if (!out) throw std::runtime_error("save_cache: write failed on " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

namespace {

SampleSet load_cache_impl(const SampleCacheKey* key, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CacheMissError("sample cache miss: " + path);

    CacheHeader h{};
    in.read(reinterpret_cast<char*>(&h), sizeof(h));
    if (!in || h.magic != kMagic)
        throw CacheChecksumError("sample cache corrupt (bad header): " + path);
    if (h.version != kVersion)
        throw CacheChecksumError("sample cache version mismatch: " + path);
    if (key && (static_cast<int>(h.dim) != key->dim || static_cast<int>(h.count) != key->count))
        throw CacheKeyError("sample cache key mismatch: " + path + " holds d=" +
                            std::to_string(h.dim) + " N=" + std::to_string(h.count));

    std::vector<double> payload(static_cast<std::size_t>(h.dim) * h.count);
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(double)));
    if (!in || in.gcount() != static_cast<std::streamsize>(payload.size() * sizeof(double)))
        throw CacheChecksumError("sample cache truncated: " + path);

    const std::uint64_t sum = fnv1a64(reinterpret_cast<const unsigned char*>(payload.data()),
                                      payload.size() * sizeof(double));
    if (sum != h.checksum)
        throw CacheChecksumError("sample cache checksum mismatch: " + path);

    SampleSet set;
    set.dim = static_cast<int>(h.dim);
    set.count = static_cast<int>(h.count);
    set.scheme = static_cast<SampleScheme>(h.scheme);
    if (std::isfinite(h.cvm_score)) set.cvm_score = h.cvm_score;
    set.points.resize(set.count, set.dim);
    for (int i = 0; i < set.count; ++i)
        for (int j = 0; j < set.dim; ++j)
            set.points(i, j) = payload[static_cast<std::size_t>(i) * set.dim + j];
    return set;
}

}  // namespace

SampleSet load_cache(const SampleCacheKey& key, const std::string& path) {
    return load_cache_impl(&key, path);
}

SampleSet load_cache(const std::string& path) { return load_cache_impl(nullptr, path); }

}  // namespace dscem
