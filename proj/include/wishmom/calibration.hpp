#pragma once

#include <array>
#include <cmath>
#include <string>

#include "wishmom/errors.hpp"
#include "wishmom/moments.hpp"
#include "wishmom/wick.hpp"

namespace wishmom {

struct CalibrationResult {
    TraceConvention selected;
    double oracle_variance;                   // wick second moment minus squared mean
    std::array<double, 3> candidate_variance;  // indexed like kAllTraceConventions
};

// Settles which parsing of the trace term is the intended one by evaluating
// the variance under every candidate convention and keeping the unique one
// that matches the exact pairing oracle. Requires m - c = 2 so that the
// discriminating k = 1 trace term is active, and a scale matrix without
// special structure; with (block-)diagonal input several candidates coincide
// and the calibration refuses rather than guess.
inline CalibrationResult calibrate_trace_convention(const WishartModel& model, const MinorSpec& spec,
                                                    double rel_tol = 1e-8,
                                                    const WickOptions& wick_options = {}) {
    if (spec.order() - spec.overlap_size() != 2) {
        throw InvalidInputError(
            "calibrate_trace_convention: need m - c = 2 (got m = " + std::to_string(spec.order()) +
            ", c = " + std::to_string(spec.overlap_size()) + ")");
    }

    const double mean = minor_mean(model, spec);
    const double oracle = wick_second_moment(model, spec, wick_options) - mean * mean;

    CalibrationResult result{};
    result.oracle_variance = oracle;
    int matches = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double v = minor_variance(model, spec, kAllTraceConventions[i]).variance;
        result.candidate_variance[i] = v;
        if (std::abs(v - oracle) <= rel_tol * std::max(1.0, std::abs(oracle))) {
            ++matches;
            result.selected = kAllTraceConventions[i];
        }
    }

    if (matches == 0) {
        throw CalibrationError(
            "calibrate_trace_convention: no candidate matches the exact oracle; "
            "this signals a transcription defect in the variance formula",
            CalibrationError::Kind::no_match);
    }
    if (matches > 1) {
        throw CalibrationError(
            "calibrate_trace_convention: " + std::to_string(matches) +
                " candidates match the exact oracle; supply an asymmetric positive definite "
                "scale matrix with m - c = 2 so the conventions are distinguishable",
            CalibrationError::Kind::ambiguous);
    }
    return result;
}

}  // namespace wishmom
