#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "quadperc/events.hpp"

namespace quadperc {

// Admissible boundary word: position 1 is nearest the peel edge and black,
// and no two adjacent positions are white.  Packed as a bitmask (bit j-1 set
// iff position j is white), which caps lengths at 25 and makes state lookup
// a small integer key.
struct BoundaryWord {
  std::uint32_t bits = 0;
  std::uint8_t len = 1;

  static constexpr long kMaxLen = 25;

  static BoundaryWord single_black() { return {0, 1}; }

  long length() const { return len; }

  Letter at(long j) const {  // 1-based
    return static_cast<Letter>((bits >> (j - 1)) & 1u);
  }

  bool admissible() const {
    if (len < 1 || len > kMaxLen) return false;
    if (bits & 1u) return false;                       // position 1 black
    if (bits >> len) return false;                     // no stray bits
    return (bits & (bits >> 1)) == 0;                  // no adjacent whites
  }

  BoundaryWord dropped(long k) const {
    BoundaryWord w{bits >> k, static_cast<std::uint8_t>(len - k)};
    if (w.len == 0) w = single_black();  // emptied by a full swallow
    return w;
  }

  BoundaryWord prepended(Letter l) const {
    return {(bits << 1) | static_cast<std::uint32_t>(l),
            static_cast<std::uint8_t>(len + 1)};
  }

  BoundaryWord truncated(long k) const {
    if (len <= k) return *this;
    return {bits & ((1u << k) - 1u), static_cast<std::uint8_t>(k)};
  }

  std::uint32_t key() const { return (static_cast<std::uint32_t>(len) << 25) | bits; }

  std::string to_string() const {  // position-1-first, 'b'/'o'
    std::string s;
    for (long j = 1; j <= len; ++j)
      s.push_back(at(j) == Letter::white ? 'o' : 'b');
    return s;
  }

  friend bool operator==(const BoundaryWord&, const BoundaryWord&) = default;
};

// Applies an update action and truncates to capacity.  Reset and emptying
// drops both land on the single black word.
BoundaryWord apply_action(const BoundaryWord& w, const UpdateAction& a,
                          long capacity);

// boundary_update = decide_update + apply_action on a capacity-K word.
inline BoundaryWord boundary_update(const BoundaryWord& w, const PeelEvent& e,
                                    const ColourDraw& d, long capacity) {
  if (!w.admissible() || w.length() > capacity)
    throw std::invalid_argument("boundary_update: inadmissible input word");
  UpdateAction a = decide_update(e, d, w.length(),
                                 [&](long j) { return w.at(j); });
  return apply_action(w, a, capacity);
}

// All admissible words of length <= capacity, ordered by length then
// lexicographically (black < white, position-1-first).  Counts per length
// follow the Fibonacci recurrence 1, 2, 3, 5, ...
class StateSpace {
 public:
  explicit StateSpace(long capacity);

  long capacity() const { return capacity_; }
  long size() const { return static_cast<long>(states_.size()); }
  const BoundaryWord& word(long i) const { return states_[i]; }
  const std::vector<BoundaryWord>& words() const { return states_; }
  long index(const BoundaryWord& w) const;

 private:
  long capacity_;
  std::vector<BoundaryWord> states_;
  std::unordered_map<std::uint32_t, long> index_;
};

}  // namespace quadperc
