#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace iim {

// Error taxonomy. Everything user-recoverable derives from Error so the CLI
// can map exception type -> exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct TopologyError : Error {
    using Error::Error;
};
struct StepError : Error {
    using Error::Error;
};
struct ResolutionError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

// Stderr warning sink. Tests may silence it.
void warn(const std::string& msg);
void set_warnings_enabled(bool on);

inline int wrap_index(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}

inline double sqr(double x) { return x * x; }

// Richardson slope log2(e_coarse/e_fine) for a halving refinement.
inline double observed_order(double err_coarse, double err_fine) {
    return std::log2(err_coarse / err_fine);
}

std::string format_double(double v);

} // namespace iim
