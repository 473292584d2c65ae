#pragma once

#include <cstddef>
#include <vector>

namespace posdelay {

using Point = std::vector<double>;

/// Radical inverse of `index` in the prime base for coordinate `dim`.
double halton(std::size_t index, std::size_t dim);

/// Halton points 1..count of dimension n scaled to [0, bound]^n.
/// Index 0 (the origin) is skipped.
std::vector<Point> halton_points(std::size_t n, std::size_t count, double bound);

/// All 2^n corners of [0, bound]^n; bit j of the corner index selects
/// coordinate j, so the origin comes first.
std::vector<Point> box_corners(std::size_t n, double bound);

/// Corners followed by `count` Halton points: the sample set shared by the
/// hypothesis checks.
std::vector<Point> region_samples(std::size_t n, double bound, std::size_t count);

}  // namespace posdelay
