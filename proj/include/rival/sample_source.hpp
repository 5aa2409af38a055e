#pragma once

#include <span>
#include <vector>

#include "rival/binned_measure.hpp"

namespace rival {

enum class FunctionOfInterest {
    NearestChangepointDistance,
    IntensityLevel,
};

// A rival sampler: produces one binned sample per draw. Sources owning a
// point-process target can additionally evaluate fixed-dimension functions
// of the last draw at a set of reference points.
class SampleSource {
public:
    virtual ~SampleSource() = default;

    virtual BinKey draw() = 0;

    // Values of the chosen function of interest for the most recent draw,
    // one per reference point. Throws std::logic_error for sources without
    // point-process structure.
    virtual std::vector<double> reference_values(FunctionOfInterest kind,
                                                 std::span<const double> points) = 0;
};

}  // namespace rival
