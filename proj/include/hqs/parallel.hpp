/*
   Copyright 2026 The hqs Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace hqs {

/// Worker count: HQS_THREADS if set (must be a positive integer), else the
/// hardware concurrency.
inline unsigned worker_count()
{
    if (char const* env = std::getenv("HQS_THREADS"); env != nullptr) {
        std::string_view const text{env};
        unsigned value = 0;
        auto const [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || end != text.data() + text.size() || value == 0) {
            throw std::invalid_argument("HQS_THREADS must be a positive integer, got '" +
                                        std::string(text) + "'");
        }
        return value;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/**
 * Split [0, n) into contiguous blocks, run `body(local, begin, end)` for each
 * block on up to `workers` threads, then fold the per-block results into
 * `init` with `merge` in block order.
 *
 * Callers must make `body` depend only on the indices it is given; the
 * result is then independent of the worker count.
 */
template <class Local, class Body, class Merge>
Local parallel_accumulate(std::uint64_t n, Local init, Body body, Merge merge,
                          unsigned workers = worker_count())
{
    workers = static_cast<unsigned>(std::clamp<std::uint64_t>(workers, 1, std::max<std::uint64_t>(n, 1)));
    if (workers == 1) {
        body(init, std::uint64_t{0}, n);
        return init;
    }

    std::vector<Local> partial(workers, Local{});
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            std::uint64_t const begin = n * w / workers;
            std::uint64_t const end = n * (w + 1) / workers;
            pool.emplace_back([&, w, begin, end] {
                try {
                    body(partial[w], begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto const& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    for (auto& p : partial) {
        merge(init, std::move(p));
    }
    return init;
}

} // namespace hqs
