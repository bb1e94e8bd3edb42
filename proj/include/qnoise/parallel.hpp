// Copyright 2026 The qnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace qnoise {

/// Applies fn(i) for i in [0, count) across `workers` threads, returning the
/// results in index order. Output is identical for any worker count because
/// every result is stored at its own index; if several calls throw, the
/// exception with the lowest index is rethrown (the rest are discarded).
/// An optional progress callback receives the number of completed items at
/// every multiple of `progress_every`.
template <typename Result>
std::vector<Result> parallel_ordered_map(int64_t count, int workers,
                                         const std::function<Result(int64_t)>& fn,
                                         int64_t progress_every = 0,
                                         const std::function<void(int64_t)>& progress = nullptr) {
    if (count < 0) {
        throw std::invalid_argument("parallel_ordered_map: negative count");
    }
    if (workers < 1) {
        throw std::invalid_argument("parallel_ordered_map: workers must be >= 1");
    }
    std::vector<Result> results(static_cast<size_t>(count));
    std::atomic<int64_t> next{0};
    std::atomic<int64_t> done{0};
    std::mutex error_mutex;
    std::exception_ptr first_error = nullptr;
    int64_t first_error_index = -1;

    const auto worker = [&]() {
        while (true) {
            const int64_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                results[static_cast<size_t>(i)] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error_index < 0 || i < first_error_index) {
                    first_error_index = i;
                    first_error = std::current_exception();
                }
                continue;
            }
            const int64_t completed = done.fetch_add(1) + 1;
            if (progress_every > 0 && progress && completed % progress_every == 0) {
                std::lock_guard<std::mutex> lock(error_mutex);
                progress(completed);
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            threads.emplace_back(worker);
        }
        for (std::thread& t : threads) {
            t.join();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
    return results;
}

}  // namespace qnoise
