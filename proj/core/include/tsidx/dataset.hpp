#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace tsidx {

// A row-major block of float32 series. `length` is the in-memory length;
// when a loaded file needed padding to a segment multiple, `source_length`
// keeps the length it had on disk.
struct Dataset {
    std::size_t count = 0;
    std::size_t length = 0;
    std::size_t source_length = 0;
    std::vector<float> values;

    std::span<const float> series(std::size_t i) const {
        return {values.data() + i * length, length};
    }
    std::span<float> series_mut(std::size_t i) {
        return {values.data() + i * length, length};
    }
};

// Random-walk series: the first value is drawn from N(0,1) and every
// following value adds a fresh N(0,1) step. Each series seeds its own
// generator from (seed, index), so any subset can be regenerated
// independently and thread scheduling cannot change the output.
Dataset generate_random_walk(std::size_t count, std::size_t length, std::uint64_t seed);

// In-place z-normalization (mean 0, population std 1). Returns false and
// leaves the series untouched when the variance is degenerate; the caller
// decides whether that is an error or becomes an all-zero series.
bool znormalize(std::span<float> series);

// Headerless little-endian float32 files. load_dataset throws
// std::runtime_error when the file size is not a multiple of the series
// size; the message carries the offending byte counts.
Dataset load_dataset(const std::filesystem::path& path, std::size_t length);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);

// Repeat-last-value padding up to the next multiple of w. Series already
// aligned pass through unchanged. source_length records the input length.
Dataset pad_to_segment_multiple(Dataset dataset, int w);

}  // namespace tsidx
