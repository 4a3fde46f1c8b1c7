#include "iim/common.hpp"

#include <cstdarg>
#include <iostream>

namespace iim {

namespace {
bool g_warnings_enabled = true;
}

void warn(const std::string& msg) {
    if (g_warnings_enabled) {
        std::cerr << "[iim] warning: " << msg << "\n";
    }
}

void set_warnings_enabled(bool on) { g_warnings_enabled = on; }

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace iim
