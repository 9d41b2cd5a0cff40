#include "selfsim/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

#include "selfsim/types.hpp"

namespace selfsim::par {

namespace {
int g_thread_count = 0;

int auto_thread_count() {
    if (const char* env = std::getenv("SELFSIM_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}
}  // namespace

int thread_count() {
    return g_thread_count > 0 ? g_thread_count : auto_thread_count();
}

void set_thread_count(int n) { g_thread_count = n; }

void for_chunks(std::size_t n, const std::function<void(const ChunkRange&)>& fn) {
    if (n == 0) return;
    int chunks = static_cast<int>(std::min<std::size_t>(kChunkGrid, n));
    std::size_t per = n / chunks;
    std::size_t rem = n % chunks;

    auto chunk_range = [&](int c) {
        // First `rem` chunks get one extra element; boundaries depend only on (n, chunks).
        std::size_t begin = static_cast<std::size_t>(c) * per + std::min<std::size_t>(c, rem);
        std::size_t len = per + (static_cast<std::size_t>(c) < rem ? 1 : 0);
        return ChunkRange{begin, begin + len, c, chunks};
    };

    int workers = std::min(thread_count(), chunks);
    if (workers <= 1) {
        for (int c = 0; c < chunks; ++c) fn(chunk_range(c));
        return;
    }

    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};

    auto work = [&] {
        for (;;) {
            int c = next.fetch_add(1);
            if (c >= chunks || failed.load()) break;
            try {
                fn(chunk_range(c));
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
                break;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failed.load() && first_error) std::rethrow_exception(first_error);
}

double sum(std::size_t n, const std::function<double(std::size_t)>& term) {
    if (n == 0) return 0.0;
    int chunks = static_cast<int>(std::min<std::size_t>(kChunkGrid, n));
    std::vector<double> partial(chunks, 0.0);
    for_chunks(n, [&](const ChunkRange& r) {
        KahanSum acc;
        for (std::size_t i = r.begin; i < r.end; ++i) acc.add(term(i));
        partial[r.index] = acc.value();
    });
    KahanSum total;
    for (double x : partial) total.add(x);
    return total.value();
}

}  // namespace selfsim::par
