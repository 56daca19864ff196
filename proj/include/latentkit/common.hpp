#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace latentkit {

// Error taxonomy shared by all modules. The CLI maps config_error to exit
// code 2 and everything else to exit code 1.
enum class errc {
    empty_source,
    no_complete_cases,
    config_error,
    insufficient_data,
    singular_matrix,
    degenerate,
    domain_error,
    extraction_failed,
    rotation_failed,
    collinear,
    dimension_error,
    min_trials,
    io_error,
};

const char* to_string(errc c);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& msg)
        : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

// Missing cells are carried as quiet NaN through every numeric matrix.
inline constexpr double missing_value = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

} // namespace latentkit
