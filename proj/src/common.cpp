#include "ctpath/common.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace ctpath {

namespace {
std::atomic<unsigned> g_threads{0};
std::atomic<bool> g_quiet{false};
std::mutex g_log_mutex;
}  // namespace

void set_thread_count(unsigned n) { g_threads = n; }

unsigned thread_count()
{
    unsigned n = g_threads.load();
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

void set_quiet(bool quiet) { g_quiet = quiet; }

void log_warning(const std::string& message)
{
    std::lock_guard lock(g_log_mutex);
    std::cerr << "warning: " << message << '\n';
}

void log_info(const std::string& message)
{
    if (g_quiet) return;
    std::lock_guard lock(g_log_mutex);
    std::cerr << message << '\n';
}

}  // namespace ctpath
