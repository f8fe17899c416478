#pragma once

#include <atomic>
#include <condition_variable>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wgmig {

/// Runs compute(0..count-1) on `workers` threads and delivers results to
/// `consume` strictly in index order. The consumption order is therefore
/// identical for any worker count, which makes floating-point reductions
/// reproducible. In-flight results are bounded by 4*workers.
///
/// A throwing compute() aborts the run; the exception is rethrown on the
/// calling thread with the failing index prefixed.
template <class Result>
void parallel_ordered(std::size_t count, unsigned workers,
                      const std::function<Result(std::size_t)>& compute,
                      const std::function<void(std::size_t, Result&&)>& consume) {
    if (count == 0) return;
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) consume(i, compute(i));
        return;
    }

    std::mutex mutex;
    std::condition_variable cv;
    std::map<std::size_t, Result> buffer;
    std::size_t next_index = 0;    // next index handed to a worker
    std::size_t next_needed = 0;   // next index the consumer expects
    const std::size_t capacity = 4 * static_cast<std::size_t>(workers);
    std::exception_ptr failure;
    std::size_t failed_index = 0;

    const auto worker = [&]() {
        while (true) {
            std::size_t index;
            {
                std::unique_lock lock(mutex);
                cv.wait(lock, [&] {
                    return failure || next_index >= count ||
                           buffer.size() < capacity;
                });
                if (failure || next_index >= count) return;
                index = next_index++;
            }
            Result result;
            try {
                result = compute(index);
            } catch (...) {
                std::scoped_lock lock(mutex);
                if (!failure) {
                    failure = std::current_exception();
                    failed_index = index;
                }
                cv.notify_all();
                return;
            }
            {
                std::scoped_lock lock(mutex);
                buffer.emplace(index, std::move(result));
                while (!buffer.empty() && buffer.begin()->first == next_needed && !failure) {
                    auto node = buffer.extract(buffer.begin());
                    try {
                        consume(node.key(), std::move(node.mapped()));
                    } catch (...) {
                        failure = std::current_exception();
                        failed_index = node.key();
                        break;
                    }
                    ++next_needed;
                }
                cv.notify_all();
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            throw std::runtime_error("realization " + std::to_string(failed_index) + ": " +
                                     e.what());
        }
    }
}

} // namespace wgmig
