#include "gapboot/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace gapboot {

namespace {

std::mutex g_warning_mutex;
WarningHandler g_warning_handler;

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(g_warning_mutex);
    std::swap(g_warning_handler, handler);
    return handler;
}

void warn(const std::string& message) {
    std::lock_guard lock(g_warning_mutex);
    if (g_warning_handler) {
        g_warning_handler(message);
    } else {
        std::cerr << "gapboot: warning: " << message << '\n';
    }
}

}  // namespace gapboot
