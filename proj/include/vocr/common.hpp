#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace vocr {

// Error hierarchy. Every precondition violation in the library throws one
// of these; the CLI maps them onto its exit-code contract.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Geometry or sampling outside the raster.
struct BoundsError : Error {
    using Error::Error;
};

// Caller broke an API contract (mixed frames, mismatched dimensions, ...).
struct UsageError : Error {
    using Error::Error;
};

// Malformed file content (PNM, filter bank, config, dictionary).
struct FormatError : Error {
    using Error::Error;
};

// Filter training could not produce a usable bank.
struct TrainError : Error {
    using Error::Error;
};

// External OCR adapter failed (timeout, nonzero exit).
struct EngineError : Error {
    using Error::Error;
};

// Run `fn(i)` for i in [0, n) on `jobs` threads (0 = hardware concurrency).
// Work is split into contiguous chunks; callers get determinism by writing
// result slot i only, never shared state.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace vocr
