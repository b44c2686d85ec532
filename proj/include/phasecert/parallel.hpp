#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace phasecert
{

/// Number of worker threads used by parallel_for; 0 selects hardware concurrency.
inline std::size_t& worker_count()
{
    static std::size_t workers = 0;
    return workers;
}

/// Runs body(i) for i in [0, n). Tasks are independent and write to their own
/// slots, so callers reduce afterwards in index order and results do not depend
/// on the number of workers.
template <typename Body>
void parallel_for(std::size_t n, Body&& body)
{
    std::size_t workers = worker_count() ? worker_count() : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
    {
        pool.emplace_back([&, w] {
            try
            {
                for (std::size_t i = next++; i < n; i = next++)
                    body(i);
            }
            catch (...)
            {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace phasecert
