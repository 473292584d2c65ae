#include "posdelay/sampling.hpp"

#include <array>
#include <stdexcept>

namespace posdelay {

namespace {

constexpr std::array<unsigned, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

double halton(std::size_t index, std::size_t dim) {
  if (dim >= kPrimes.size()) throw std::invalid_argument("halton: dimension above 16 not supported");
  const unsigned base = kPrimes[dim];
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

std::vector<Point> halton_points(std::size_t n, std::size_t count, double bound) {
  std::vector<Point> pts(count, Point(n));
  for (std::size_t k = 0; k < count; ++k)
    for (std::size_t j = 0; j < n; ++j) pts[k][j] = bound * halton(k + 1, j);
  return pts;
}

std::vector<Point> box_corners(std::size_t n, double bound) {
  if (n > 20) throw std::invalid_argument("box_corners: dimension too large");
  const std::size_t count = std::size_t{1} << n;
  std::vector<Point> pts(count, Point(n, 0.0));
  for (std::size_t c = 0; c < count; ++c)
    for (std::size_t j = 0; j < n; ++j)
      if (c & (std::size_t{1} << j)) pts[c][j] = bound;
  return pts;
}

std::vector<Point> region_samples(std::size_t n, double bound, std::size_t count) {
  auto pts = box_corners(n, bound);
  auto interior = halton_points(n, count, bound);
  pts.insert(pts.end(), interior.begin(), interior.end());
  return pts;
}

}  // namespace posdelay
