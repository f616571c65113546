#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "xicor/error.hpp"

namespace xicor {

/// n paired observations (x_i, y_i). Finiteness and n >= 2 are enforced at
/// construction so every downstream formula can assume a valid sample.
struct PairedSample {
    std::vector<double> xs;
    std::vector<double> ys;

    PairedSample(std::vector<double> x, std::vector<double> y)
        : xs(std::move(x)), ys(std::move(y)) {
        if (xs.size() != ys.size())
            throw DomainError("x and y must have the same length");
        if (xs.size() < 2) throw SampleTooSmallError(xs.size());
        for (double v : xs)
            if (!std::isfinite(v)) throw DomainError("non-finite x value");
        for (double v : ys)
            if (!std::isfinite(v)) throw DomainError("non-finite y value");
    }

    std::size_t size() const noexcept { return xs.size(); }

    /// The same data with the roles of x and y exchanged.
    PairedSample swapped() const { return PairedSample(ys, xs); }
};

}  // namespace xicor
