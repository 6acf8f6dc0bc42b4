#ifndef CTPATH_COMMON_HPP
#define CTPATH_COMMON_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ctpath {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// A 10-point decile series or any other real-valued sequence.
using Series = Vector<double>;

inline constexpr int kDeciles = 10;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual, std::vector<double> trace = {})
        : Error(what), residual_(residual), trace_(std::move(trace)) {}

    double residual() const noexcept { return residual_; }
    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    double residual_;
    std::vector<double> trace_;
};

void set_thread_count(unsigned n);
unsigned thread_count();

void log_warning(const std::string& message);
void log_info(const std::string& message);
void set_quiet(bool quiet);

/// Runs fn(i) for i in [0, n) over thread_count() workers. Each index is
/// visited exactly once; callers write results into pre-sized slots.
template <typename F>
void parallel_for(std::size_t n, F&& fn)
{
    const std::size_t workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace ctpath

#endif  // CTPATH_COMMON_HPP
