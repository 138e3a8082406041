#ifndef ROUGH_ATTRACTOR_GRID_HPP
#define ROUGH_ATTRACTOR_GRID_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rough_attractor {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Raised when an argument is outside the domain a routine supports. */
class DomainError : public Error {
 public:
  using Error::Error;
};

/** Raised when a computation needs data beyond the stored time window. */
class WindowError : public Error {
 public:
  WindowError(const std::string& what, double needed_lo, double needed_hi)
      : Error(what), needed_lo_(needed_lo), needed_hi_(needed_hi) {}
  double needed_lo() const { return needed_lo_; }
  double needed_hi() const { return needed_hi_; }

 private:
  double needed_lo_;
  double needed_hi_;
};

/**
 * A uniform time grid whose points are integer multiples of dt.
 * Point k sits at (first + k) * dt, so time 0 is index -first when it is
 * part of the grid.
 */
struct TimeGrid {
  double dt = 0.0;
  std::int64_t first = 0;
  std::size_t n = 0;

  double time(std::size_t k) const {
    return static_cast<double>(first + static_cast<std::int64_t>(k)) * dt;
  }
  double t0() const { return time(0); }
  double t_end() const { return time(n - 1); }
  std::int64_t last() const { return first + static_cast<std::int64_t>(n) - 1; }

  bool same_spacing(const TimeGrid& o) const { return dt == o.dt; }

  bool covers(double a, double b) const {
    const double slack = 1e-9 * dt;
    return a >= t0() - slack && b <= t_end() + slack;
  }

  /** Grid index of an aligned time, or nothing when t is off grid or outside. */
  std::optional<std::size_t> index_of(double t) const {
    const double r = t / dt;
    const double k = std::nearbyint(r);
    if (std::abs(r - k) > 1e-7) return std::nullopt;
    const std::int64_t local = static_cast<std::int64_t>(k) - first;
    if (local < 0 || local >= static_cast<std::int64_t>(n)) return std::nullopt;
    return static_cast<std::size_t>(local);
  }

  std::size_t checked_index(double t, const char* what) const {
    auto k = index_of(t);
    if (!k) {
      std::ostringstream os;
      os << what << ": time " << t << " is not a grid point of [" << t0() << ", "
         << t_end() << "] with dt " << dt;
      if (t < t0() || t > t_end()) throw WindowError(os.str(), t, t);
      throw DomainError(os.str());
    }
    return *k;
  }

  /** Largest grid index whose time is <= t (t must lie in the window). */
  std::size_t floor_index(double t) const {
    const double r = t / dt + 1e-9;
    const std::int64_t local = static_cast<std::int64_t>(std::floor(r)) - first;
    if (local < 0 || local >= static_cast<std::int64_t>(n)) {
      std::ostringstream os;
      os << "time " << t << " outside window [" << t0() << ", " << t_end() << "]";
      throw WindowError(os.str(), t, t);
    }
    return static_cast<std::size_t>(local);
  }

  TimeGrid sub(std::size_t k0, std::size_t m) const {
    return TimeGrid{dt, first + static_cast<std::int64_t>(k0), m};
  }
};

inline bool same_points(const TimeGrid& a, const TimeGrid& b) {
  return a.dt == b.dt && a.first == b.first && a.n == b.n;
}

}  // namespace rough_attractor

#endif
