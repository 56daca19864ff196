#include "latentkit/common.hpp"

namespace latentkit {

const char* to_string(errc c) {
    switch (c) {
        case errc::empty_source: return "EMPTY_SOURCE";
        case errc::no_complete_cases: return "NO_COMPLETE_CASES";
        case errc::config_error: return "CONFIG_ERROR";
        case errc::insufficient_data: return "INSUFFICIENT_DATA";
        case errc::singular_matrix: return "SINGULAR_MATRIX";
        case errc::degenerate: return "DEGENERATE";
        case errc::domain_error: return "DOMAIN_ERROR";
        case errc::extraction_failed: return "EXTRACTION_FAILED";
        case errc::rotation_failed: return "ROTATION_FAILED";
        case errc::collinear: return "COLLINEAR";
        case errc::dimension_error: return "DIMENSION_ERROR";
        case errc::min_trials: return "MIN_TRIALS";
        case errc::io_error: return "IO_ERROR";
    }
    return "UNKNOWN";
}

} // namespace latentkit
