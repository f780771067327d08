#pragma once

// Azimuth arithmetic, binning and the azimuth-only cone of confusion.
//
// Convention: 0 deg is front, 90 right, 180 back, 270 left. All azimuths are
// kept in [0, 360).

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace audioplace {

/// Wraps any finite angle into [0, 360). Throws on NaN or infinity.
inline double normalize_degrees(double raw) {
  if (!std::isfinite(raw)) {
    throw std::invalid_argument("azimuth must be finite");
  }
  double d = std::fmod(raw, 360.0);
  if (d < 0.0) d += 360.0;
  // fmod of a tiny negative value plus 360 rounds to exactly 360
  if (d >= 360.0) d = 0.0;
  return d;
}

class Azimuth {
 public:
  constexpr Azimuth() = default;
  explicit Azimuth(double raw_degrees) : degrees_(normalize_degrees(raw_degrees)) {}

  double degrees() const { return degrees_; }

  friend bool operator==(const Azimuth&, const Azimuth&) = default;
  friend auto operator<=>(const Azimuth&, const Azimuth&) = default;

 private:
  double degrees_ = 0.0;
};

inline Azimuth normalize(double raw_degrees) { return Azimuth(raw_degrees); }

/// Shortest arc between two azimuths, in [0, 180].
inline double angular_distance(Azimuth a, Azimuth b) {
  const double d = std::fabs(a.degrees() - b.degrees());
  return d > 180.0 ? 360.0 - d : d;
}

/// Front-back reflection across the interaural axis: theta -> 180 - theta.
/// Involution with fixed points 90 and 270.
inline Azimuth mirror_front_back(Azimuth a) { return Azimuth(180.0 - a.degrees()); }

/// Which points of a sound's cone are compared against other elements.
enum class ConeMode {
  point_plus_mirror,  // {s, mirror(s)}
  mirror_only,        // {mirror(s)}
};

inline std::string to_string(ConeMode mode) {
  return mode == ConeMode::mirror_only ? "mirror-only" : "point-plus-mirror";
}

inline ConeMode parse_cone_mode(const std::string& text) {
  if (text == "point-plus-mirror") return ConeMode::point_plus_mirror;
  if (text == "mirror-only") return ConeMode::mirror_only;
  throw std::invalid_argument("unknown cone mode '" + text +
                              "' (expected point-plus-mirror or mirror-only)");
}

/// Azimuth-only cone of confusion of `a`: the point and its front-back mirror.
/// Singleton on the interaural axis.
inline std::vector<Azimuth> cone_set(Azimuth a) {
  const Azimuth m = mirror_front_back(a);
  if (m == a) return {a};
  return {a, m};
}

/// Points of the cone that enter the distance term under `mode`.
inline std::vector<Azimuth> cone_points(Azimuth a, ConeMode mode) {
  if (mode == ConeMode::mirror_only) return {mirror_front_back(a)};
  return cone_set(a);
}

struct BinIndex {
  int index = 0;

  friend bool operator==(const BinIndex&, const BinIndex&) = default;
  friend auto operator<=>(const BinIndex&, const BinIndex&) = default;
};

/// Partition of the circle into equal half-open bins [k*size, (k+1)*size).
class BinGrid {
 public:
  explicit BinGrid(int bin_size_deg) : size_(bin_size_deg) {
    if (bin_size_deg <= 0 || 360 % bin_size_deg != 0) {
      throw std::invalid_argument("bin size " + std::to_string(bin_size_deg) +
                                  " deg does not divide 360");
    }
  }

  int bin_size_deg() const { return size_; }
  int bin_count() const { return 360 / size_; }

  BinIndex bin_of(Azimuth a) const {
    const int k = static_cast<int>(std::floor(a.degrees() / size_));
    return BinIndex{k < bin_count() ? k : bin_count() - 1};
  }

  Azimuth center(BinIndex b) const { return Azimuth((b.index + 0.5) * size_); }

  bool contains(BinIndex b) const { return b.index >= 0 && b.index < bin_count(); }

  friend bool operator==(const BinGrid&, const BinGrid&) = default;

 private:
  int size_;
};

inline BinIndex bin_of(Azimuth a, int bin_size_deg) { return BinGrid(bin_size_deg).bin_of(a); }

/// Half-open circular interval [start, end) in degrees; start may exceed end
/// (wraps through 0). A zero-length interval is empty.
inline bool in_arc(Azimuth a, double start_deg, double end_deg) {
  const double s = normalize_degrees(start_deg);
  const double e = normalize_degrees(end_deg);
  const double t = a.degrees();
  if (s < e) return t >= s && t < e;
  if (s > e) return t >= s || t < e;
  return false;
}

}  // namespace audioplace
