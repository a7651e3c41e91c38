#include "tsidx/dataset.hpp"

#include "tsidx/config.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>
#include <thread>

namespace tsidx {

static_assert(std::endian::native == std::endian::little,
              "dataset files are little-endian float32; big-endian hosts need byte swaps");
static_assert(sizeof(float) == 4);

namespace {

// splitmix64 finalizer; decorrelates consecutive series indices.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t i) {
    std::uint64_t z = seed + (i + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

void fill_walk(std::span<float> out, std::uint64_t seed, std::uint64_t series_index) {
    std::mt19937_64 rng(mix_seed(seed, series_index));
    std::normal_distribution<double> gauss(0.0, 1.0);
    double value = 0.0;
    for (auto& v : out) {
        value += gauss(rng);
        v = static_cast<float>(value);
    }
}

}  // namespace

Dataset generate_random_walk(std::size_t count, std::size_t length, std::uint64_t seed) {
    if (count == 0 || length == 0)
        throw std::invalid_argument("generate_random_walk: count and length must be positive");
    Dataset ds;
    ds.count = count;
    ds.length = length;
    ds.source_length = length;
    ds.values.resize(count * length);

    unsigned threads = static_cast<unsigned>(
        std::min<std::size_t>(IndexConfig::default_workers(), count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fill_walk(ds.series_mut(i), seed, i);
        return ds;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            // Per-series seeding makes the partition irrelevant to output.
            std::size_t begin = count * t / threads;
            std::size_t end = count * (t + 1) / threads;
            for (std::size_t i = begin; i < end; ++i) fill_walk(ds.series_mut(i), seed, i);
        });
    }
    for (auto& th : pool) th.join();
    return ds;
}

bool znormalize(std::span<float> series) {
    if (series.empty()) throw std::invalid_argument("znormalize: empty series");
    const std::size_t n = series.size();
    double sum = 0.0;
    for (float v : series) sum += v;
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (float v : series) {
        double d = v - mean;
        sq += d * d;
    }
    const double std_dev = std::sqrt(sq / static_cast<double>(n));
    if (std_dev <= 1e-12) return false;
    for (auto& v : series) v = static_cast<float>((v - mean) / std_dev);
    return true;
}

Dataset load_dataset(const std::filesystem::path& path, std::size_t length) {
    if (length == 0) throw std::invalid_argument("load_dataset: length must be positive");
    std::error_code ec;
    const auto bytes = std::filesystem::file_size(path, ec);
    if (ec) throw std::runtime_error("load_dataset: cannot stat " + path.string() + ": " + ec.message());
    const std::size_t series_bytes = length * sizeof(float);
    if (bytes == 0 || bytes % series_bytes != 0)
        throw std::runtime_error("load_dataset: " + path.string() + " holds " +
                                 std::to_string(bytes) + " bytes, not a positive multiple of " +
                                 std::to_string(series_bytes) + " (length " +
                                 std::to_string(length) + " * 4)");
    Dataset ds;
    ds.count = bytes / series_bytes;
    ds.length = length;
    ds.source_length = length;
    ds.values.resize(ds.count * length);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_dataset: cannot open " + path.string());
    in.read(reinterpret_cast<char*>(ds.values.data()), static_cast<std::streamsize>(bytes));
    if (in.gcount() != static_cast<std::streamsize>(bytes))
        throw std::runtime_error("load_dataset: short read from " + path.string());
    return ds;
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_dataset: cannot open " + path.string());
    out.write(reinterpret_cast<const char*>(dataset.values.data()),
              static_cast<std::streamsize>(dataset.values.size() * sizeof(float)));
    if (!out) throw std::runtime_error("save_dataset: short write to " + path.string());
}

Dataset pad_to_segment_multiple(Dataset dataset, int w) {
    if (w < 1) throw std::invalid_argument("pad_to_segment_multiple: w must be at least 1");
    const auto uw = static_cast<std::size_t>(w);
    if (dataset.length % uw == 0) return dataset;
    const std::size_t padded = (dataset.length / uw + 1) * uw;
    Dataset out;
    out.count = dataset.count;
    out.length = padded;
    out.source_length = dataset.length;
    out.values.resize(dataset.count * padded);
    for (std::size_t i = 0; i < dataset.count; ++i) {
        auto src = dataset.series(i);
        float* dst = out.values.data() + i * padded;
        std::memcpy(dst, src.data(), src.size() * sizeof(float));
        const float last = src.back();
        for (std::size_t j = dataset.length; j < padded; ++j) dst[j] = last;
    }
    return out;
}

}  // namespace tsidx
