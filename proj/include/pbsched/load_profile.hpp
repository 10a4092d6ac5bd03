#pragma once

#include <vector>

namespace pbsched {

struct LoadSegment {
  double start = 0;       // seconds
  double resistance = 0;  // ohms
};

/// Piecewise-constant load resistance. Segment i covers
/// [start_i, start_{i+1}); the last segment extends forever.
class LoadProfile {
 public:
  explicit LoadProfile(std::vector<LoadSegment> segments);

  static LoadProfile constant(double resistance) { return LoadProfile({{0.0, resistance}}); }

  const std::vector<LoadSegment>& segments() const { return segments_; }

  /// Resistance in force at time t >= 0.
  double at(double t) const;

 private:
  std::vector<LoadSegment> segments_;
};

inline double load_profile_eval(const LoadProfile& profile, double t) { return profile.at(t); }

}  // namespace pbsched
