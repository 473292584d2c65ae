#pragma once

// Index-space kernels shared by the grid searches. Each kernel has a serial
// reference and an OpenMP version; both return identical results because
// reductions are ordered by index, never by arrival.

#include <cstddef>
#include <exception>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace posdelay {

enum class Exec { Serial, Parallel };

/// Work below this many items runs serially even under Exec::Parallel.
inline constexpr std::size_t kParallelThreshold = 256;

namespace serial {

/// Lowest index i in [0, count) with fn(i) engaged, or nullopt.
/// An exception from fn(i) propagates only if no hit precedes i.
template <class T, class Fn>
std::optional<std::pair<std::size_t, T>> first_hit(std::size_t count, Fn&& fn) {
  for (std::size_t i = 0; i < count; ++i) {
    std::optional<T> r = fn(i);
    if (r) return std::pair<std::size_t, T>{i, std::move(*r)};
  }
  return std::nullopt;
}

/// Index of the maximum of fn over [0, count); ties go to the lowest index.
template <class Fn>
std::pair<std::size_t, double> argmax(std::size_t count, Fn&& fn) {
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    const double v = fn(i);
    if (i == 0 || v > best_value) {
      best = i;
      best_value = v;
    }
  }
  return {best, best_value};
}

template <class T, class Fn>
std::vector<T> map(std::size_t count, Fn&& fn) {
  std::vector<T> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(fn(i));
  return out;
}

}  // namespace serial

namespace omp {

template <class T, class Fn>
std::optional<std::pair<std::size_t, T>> first_hit(std::size_t count, Fn&& fn) {
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t hit_index = kNone;
  std::optional<T> hit;
  std::size_t err_index = kNone;
  std::exception_ptr err;
  const auto n = static_cast<long long>(count);

#pragma omp parallel
  {
    std::size_t my_hit_index = kNone;
    std::optional<T> my_hit;
    std::size_t my_err_index = kNone;
    std::exception_ptr my_err;
#pragma omp for schedule(static)
    for (long long k = 0; k < n; ++k) {
      const auto i = static_cast<std::size_t>(k);
      if (i > my_hit_index || i > my_err_index) continue;
      try {
        std::optional<T> r = fn(i);
        if (r) {
          my_hit_index = i;
          my_hit = std::move(r);
        }
      } catch (...) {
        my_err_index = i;
        my_err = std::current_exception();
      }
    }
#pragma omp critical(posdelay_first_hit)
    {
      if (my_hit_index < hit_index) {
        hit_index = my_hit_index;
        hit = std::move(my_hit);
      }
      if (my_err_index < err_index) {
        err_index = my_err_index;
        err = my_err;
      }
    }
  }
  if (err_index < hit_index) std::rethrow_exception(err);
  if (hit_index == kNone) return std::nullopt;
  return std::pair<std::size_t, T>{hit_index, std::move(*hit)};
}

template <class Fn>
std::pair<std::size_t, double> argmax(std::size_t count, Fn&& fn) {
  std::vector<double> values(count);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t err_index = kNone;
  std::exception_ptr err;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      values[i] = fn(i);
    } catch (...) {
#pragma omp critical(posdelay_argmax)
      if (i < err_index) {
        err_index = i;
        err = std::current_exception();
      }
    }
  }
  if (err) std::rethrow_exception(err);
  return serial::argmax(count, [&](std::size_t i) { return values[i]; });
}

template <class T, class Fn>
std::vector<T> map(std::size_t count, Fn&& fn) {
  std::vector<std::optional<T>> slots(count);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t err_index = kNone;
  std::exception_ptr err;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic)
  for (long long k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      slots[i].emplace(fn(i));
    } catch (...) {
#pragma omp critical(posdelay_map)
      if (i < err_index) {
        err_index = i;
        err = std::current_exception();
      }
    }
  }
  if (err) std::rethrow_exception(err);
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace omp

template <class T, class Fn>
std::optional<std::pair<std::size_t, T>> first_hit(Exec exec, std::size_t count, Fn&& fn) {
  if (exec == Exec::Parallel && count >= kParallelThreshold) return omp::first_hit<T>(count, fn);
  return serial::first_hit<T>(count, fn);
}

template <class Fn>
std::pair<std::size_t, double> argmax(Exec exec, std::size_t count, Fn&& fn) {
  if (exec == Exec::Parallel && count >= kParallelThreshold) return omp::argmax(count, fn);
  return serial::argmax(count, fn);
}

/// Unlike the others, map goes parallel for any count above one: each item is
/// assumed to be heavy (an integration, a full condition check).
template <class T, class Fn>
std::vector<T> map(Exec exec, std::size_t count, Fn&& fn) {
  if (exec == Exec::Parallel && count > 1) return omp::map<T>(count, fn);
  return serial::map<T>(count, fn);
}

}  // namespace posdelay
