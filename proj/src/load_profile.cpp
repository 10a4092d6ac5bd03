#include "pbsched/load_profile.hpp"

#include <algorithm>
#include <iterator>
#include <string>
#include <utility>

#include "pbsched/errors.hpp"

namespace pbsched {

LoadProfile::LoadProfile(std::vector<LoadSegment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw DomainError("load profile needs at least one segment");
  if (segments_.front().start != 0) throw DomainError("load profile must start at t = 0");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (!(segments_[i].resistance > 0)) {
      throw DomainError("load segment " + std::to_string(i) + ": resistance must be > 0");
    }
    if (i > 0 && !(segments_[i].start > segments_[i - 1].start)) {
      throw DomainError("load segment " + std::to_string(i) + ": start times must be strictly increasing");
    }
  }
}

double LoadProfile::at(double t) const {
  if (!(t >= 0)) throw DomainError("load profile evaluated at negative time");
  // First segment starting strictly after t; the one before it is active.
  const auto after = std::upper_bound(segments_.begin(), segments_.end(), t,
                                      [](double time, const LoadSegment& s) { return time < s.start; });
  return std::prev(after)->resistance;
}

}  // namespace pbsched
