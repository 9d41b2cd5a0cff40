#pragma once

#include <cstddef>
#include <functional>

namespace selfsim::par {

/// Number of worker threads used by parallel loops. Resolution order:
/// set_thread_count() > SELFSIM_THREADS env var > hardware concurrency.
int thread_count();
void set_thread_count(int n);  // n <= 0 restores automatic selection

// Loops are split into a fixed chunk grid that does not depend on the thread
// count, so per-chunk partial results can be merged in index order and every
// reduction is bit-reproducible for a given (config, seed, version).
inline constexpr int kChunkGrid = 256;

struct ChunkRange {
    std::size_t begin;
    std::size_t end;
    int index;
    int count;  // total number of chunks in this loop
};

/// Runs fn over [0, n) partitioned into at most kChunkGrid chunks.
/// Chunks execute concurrently; fn must only write to chunk-local slots.
void for_chunks(std::size_t n, const std::function<void(const ChunkRange&)>& fn);

/// Deterministic parallel reduction: per-chunk Kahan partial sums merged in
/// chunk order. term(i) must be pure.
double sum(std::size_t n, const std::function<double(std::size_t)>& term);

}  // namespace selfsim::par
