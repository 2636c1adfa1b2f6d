// Measurement report for a slice: every measurement per track (and
// optionally per track-measure) with value, bin and label, plus dnoc flags
// and pitch ranges.

#pragma once

#include <string>

#include "infill/score.h"

namespace infill {

/// JSON text. Undefined measurements appear as null values with a reason.
std::string analyzeReport(const MeasureSlice& slice, bool per_measure, int indent = 2);

}  // namespace infill
