#pragma once

#include <string_view>
#include <vector>

namespace ggbm {

/// Evenly spaced grid min..max with `steps` points (both ends included).
struct GridSpec {
    double min = 0.0;
    double max = 1.0;
    int steps = 2;

    void validate() const;
    std::vector<double> points() const;

    /// Parses "min:max:steps", e.g. "-4:4:81".
    static GridSpec parse(std::string_view text);
};

/// Worker count from GGBM_THREADS (positive integer), else hardware concurrency.
unsigned thread_budget();

}  // namespace ggbm
