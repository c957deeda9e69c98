#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ggn {

/// An ordered collection of real observations plus provenance metadata.
struct Sample {
    std::vector<double> values;
    std::string source;

    std::size_t size() const { return values.size(); }

    void validate_for_fit() const {
        if (values.size() < 5)
            throw std::domain_error("Sample: need at least 5 observations to fit");
        for (double v : values)
            if (!std::isfinite(v))
                throw std::domain_error("Sample: observations must be finite");
    }
};

}  // namespace ggn
