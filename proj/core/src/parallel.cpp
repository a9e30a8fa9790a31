#include "gapboot/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace gapboot {

namespace {

std::atomic<unsigned> g_max_threads{0};
thread_local bool t_inside_worker = false;

unsigned resolved_threads() {
    const unsigned requested = g_max_threads.load();
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

void set_max_threads(unsigned threads) { g_max_threads.store(threads); }

unsigned max_threads() { return resolved_threads(); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    const std::size_t workers = std::min<std::size_t>(resolved_threads(), count);
    if (workers <= 1 || t_inside_worker) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> error_index(workers, count);
    auto run_chunk = [&](std::size_t w) {
        t_inside_worker = true;
        const std::size_t begin = count * w / workers;
        const std::size_t end = count * (w + 1) / workers;
        for (std::size_t i = begin; i < end; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[w] = std::current_exception();
                error_index[w] = i;
                break;
            }
        }
        t_inside_worker = false;
    };

    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run_chunk, w);
        run_chunk(0);
    }

    for (std::size_t w = 0; w < workers; ++w) {
        if (errors[w]) std::rethrow_exception(errors[w]);
    }
}

}  // namespace gapboot
