#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "fppc/model/hash.hpp"

namespace fppc {

/// Where a batch of trials draws its randomness from and how many workers run
/// it. Trial i of cell c uses RandomField(params, master_seed, (c << 32) | i),
/// so results never depend on `workers`.
struct TrialPlan {
    std::uint64_t master_seed = 1;
    std::uint64_t cell = 0;
    int workers = 1;

    std::uint64_t trial_index(std::uint64_t i) const { return cell_trial_index(cell, i); }
};

/// Runs f(i) for i in [0, n) on up to `workers` threads that pull indices from
/// a shared counter. Output order is index order. The first exception thrown
/// by any trial is rethrown after all workers stop.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, int workers, F&& f)
{
    std::vector<R> out(n);
    int w = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                out[i] = f(i);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace fppc
