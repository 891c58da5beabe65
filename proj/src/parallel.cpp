#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "tlrgeo/util/parallel.hpp"

namespace tlrgeo::util {

namespace {
std::atomic<int> g_threads{1};
}

int num_threads() noexcept { return g_threads.load(std::memory_order_relaxed); }

void set_num_threads(int n) noexcept {
    g_threads.store(n < 1 ? 1 : n, std::memory_order_relaxed);
}

void parallel_for(index_t n, const std::function<void(index_t)>& fn) {
    int nt = num_threads();
    if (n <= 0) return;
    if (nt <= 1 || n == 1) {
        for (index_t i = 0; i < n; ++i) fn(i);
        return;
    }
    if (static_cast<index_t>(nt) > n) nt = static_cast<int>(n);

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::atomic<index_t> next{0};
    auto worker = [&]() {
        try {
            for (;;) {
                index_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) break;
                fn(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nt - 1);
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace tlrgeo::util
