#pragma once

// Replication-level parallelism. Workers take interleaved replication
// indices and own an accumulator; merging is left to the caller. Accumulators
// hold integer tallies, so the merged result is independent of the thread
// count and of scheduling.

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace maglab {

inline int resolve_threads(int requested, int64_t replications) {
    int t = requested;
    if (t <= 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        t = hc > 0 ? int(hc) : 1;
    }
    if (int64_t(t) > replications) t = int(replications);
    return t < 1 ? 1 : t;
}

template <typename Acc, typename Body>
std::vector<Acc> run_replications(int64_t replications, int threads, Body body) {
    const int t = resolve_threads(threads, replications);
    const std::size_t workers = std::size_t(t);
    std::vector<Acc> accs(workers);
    std::vector<std::exception_ptr> errors(workers);

    auto work = [&](int worker) {
        try {
            for (int64_t rep = worker; rep < replications; rep += t) {
                body(rep, accs[std::size_t(worker)]);
            }
        } catch (...) {
            errors[std::size_t(worker)] = std::current_exception();
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(std::size_t(t) - 1);
    for (int w = 1; w < t; ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return accs;
}

}  // namespace maglab
