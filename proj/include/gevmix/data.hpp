#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gevmix {

/// Observed block maxima, optionally labeled by group (season or true
/// generating component) and optionally recorded as interval-censored with
/// half-width censor_delta.
struct BlockMaximaSeries {
    std::vector<double> values;
    std::vector<std::string> group_labels;  // empty, or one label per value
    std::optional<double> censor_delta;

    std::size_t size() const { return values.size(); }

    void validate() const {
        if (values.empty()) {
            throw std::invalid_argument("BlockMaximaSeries: needs at least one value");
        }
        for (double z : values) {
            if (!std::isfinite(z)) {
                throw std::invalid_argument("BlockMaximaSeries: values must be finite");
            }
        }
        if (!group_labels.empty() && group_labels.size() != values.size()) {
            throw std::invalid_argument(
                "BlockMaximaSeries: group labels must be empty or match values");
        }
        if (censor_delta && !(*censor_delta > 0.0)) {
            throw std::invalid_argument("BlockMaximaSeries: censor_delta must be positive");
        }
    }
};

}  // namespace gevmix
