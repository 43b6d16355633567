#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace dscem {

enum class SampleScheme : std::uint32_t {
    LcdOptimized = 0,
    RandomGaussian = 1,
};

// A set of N unit-Gaussian points of dimension d, one sample per row.
// Deterministic sets carry the Cramer-von-Mises score they achieved.
struct SampleSet {
    int dim = 0;
    int count = 0;
    Eigen::MatrixXd points;  // count x dim
    SampleScheme scheme = SampleScheme::RandomGaussian;
    std::optional<double> cvm_score;

    bool valid() const {
        return dim > 0 && count > 0 && points.rows() == count &&
               points.cols() == dim && points.allFinite();
    }
};

struct SampleCacheKey {
    int dim = 0;
    int count = 0;
};

struct CacheMissError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CacheKeyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CacheChecksumError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Binary cache: {magic, version, d, N, scheme, cvm_score, checksum} header
// followed by row-major little-endian doubles. Written atomically
// (temp file + rename).
void save_cache(const SampleSet& set, const std::string& path);
SampleSet load_cache(const SampleCacheKey& key, const std::string& path);

// Loads whatever (d, N) the file holds; used for inspection.
SampleSet load_cache(const std::string& path);

// Canonical cache file name for a (d, N) key inside a cache directory.
std::string cache_file_name(const SampleCacheKey& key);

}  // namespace dscem
