#include "cri/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace cri {

unsigned worker_count() {
    unsigned requested = 0;
    if (const char* env = std::getenv("CRI_THREADS")) {
        try {
            requested = static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            requested = 0;
        }
    }
    if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
    return requested;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned workers) {
    if (workers == 0) workers = worker_count();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace cri
