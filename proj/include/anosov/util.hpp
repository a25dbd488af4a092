#pragma once

// Small numeric helpers shared across modules: compensated summation,
// deterministic seed derivation, least-squares line fits, a chunked
// parallel-for that keeps results independent of the thread count.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cmath>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "anosov/errors.hpp"

namespace anosov {

// Neumaier variant of Kahan summation.
class KahanSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
        ++count_;
    }
    double value() const { return sum_ + comp_; }
    std::int64_t count() const { return count_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    std::int64_t count_ = 0;
};

// SplitMix64 step; used to derive independent per-task seeds from
// (base seed, task index) so parallel schedules cannot change results.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ splitmix64(index + 0x51ed270b8f6abc11ULL));
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double residual_rms = 0.0;
};

// Ordinary least squares y ~ a + b x.  Requires at least two points.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error("linear_fit: need at least two matching points");
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= double(n); my /= double(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw Error("linear_fit: degenerate abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual_rms = std::sqrt(ss / double(n));
    if (n > 2) f.slope_stderr = std::sqrt(ss / double(n - 2) / sxx);
    return f;
}

// Process-wide worker-count cap applied when parallel_for is called with
// threads <= 0; zero means "use hardware concurrency".  The CLI sets it
// from --threads; results never depend on it by the worker contract.
inline std::atomic<int>& default_thread_cap() {
    static std::atomic<int> cap{0};
    return cap;
}

// Runs worker(i) for i in [0, n).  Workers must only touch state indexed
// by their own i; with that contract the result is identical for any
// thread count, including 1.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& worker) {
    if (n == 0) return;
    if (threads <= 0) threads = default_thread_cap().load();
    unsigned hw = std::thread::hardware_concurrency();
    if (threads <= 0) threads = hw ? int(hw) : 1;
    std::size_t nt = std::min<std::size_t>(std::size_t(threads), n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) worker(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (std::size_t i = t; i < n; i += nt) worker(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Shortest-round-trip decimal formatting, used by every CSV/JSON writer
// so that reruns are byte-identical.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace anosov
