#pragma once

#include <cstdint>
#include <stdexcept>

#include "quadperc/weights.hpp"

namespace quadperc {

enum class Letter : std::uint8_t { black = 0, white = 1 };

// One peeling step, classified by its boundary-visible effect.
//   three_fresh     exposes 3 edges / 2 fresh vertices, swallows nothing
//   self_parallel   exposes 1 edge parallel to the peel edge, swallows nothing
//   right_one_fresh exposes 2 edges / 1 fresh vertex, swallows k odd right
//   left_one_fresh  mirror image, swallows k odd left
//   right_no_fresh  exposes 1 edge, swallows k even right
//   left_no_fresh   mirror image
//   both_sides      exposes 1 edge, swallows k1 odd right and k2 odd left
enum class EventType : std::uint8_t {
  three_fresh,
  self_parallel,
  right_one_fresh,
  left_one_fresh,
  right_no_fresh,
  left_no_fresh,
  both_sides,
};

struct PeelEvent {
  EventType type;
  long right = 0;  // swallowed edges right of the peel edge
  long left = 0;   // swallowed edges left of the peel edge

  static PeelEvent three_fresh() { return {EventType::three_fresh}; }
  static PeelEvent self_parallel() { return {EventType::self_parallel}; }
  static PeelEvent right_one_fresh(long k) {
    check_odd(k);
    return {EventType::right_one_fresh, k, 0};
  }
  static PeelEvent left_one_fresh(long k) {
    check_odd(k);
    return {EventType::left_one_fresh, 0, k};
  }
  static PeelEvent right_no_fresh(long k) {
    check_even(k);
    return {EventType::right_no_fresh, k, 0};
  }
  static PeelEvent left_no_fresh(long k) {
    check_even(k);
    return {EventType::left_no_fresh, 0, k};
  }
  static PeelEvent both_sides(long k1, long k2) {
    check_odd(k1);
    check_odd(k2);
    return {EventType::both_sides, k1, k2};
  }

  int exposed_edges() const {
    switch (type) {
      case EventType::three_fresh: return 3;
      case EventType::right_one_fresh:
      case EventType::left_one_fresh: return 2;
      default: return 1;
    }
  }

 private:
  static void check_odd(long k) {
    if (k < 1 || k % 2 == 0)
      throw std::domain_error("peel event: swallow count must be odd >= 1");
  }
  static void check_even(long k) {
    if (k < 2 || k % 2 == 1)
      throw std::domain_error("peel event: swallow count must be even >= 2");
  }
};

// Colours of the fresh vertices, sampled independently of the event.
// zeta: number of consecutive white fresh vertices, right to left, when
//       three edges are exposed (0, 1 or 2; P = 1-p, p(1-p), p^2).
// inner: colour of the second (left) fresh vertex when zeta = 0.
// chi:  1 if the single fresh vertex is white (one-fresh events only).
struct ColourDraw {
  int zeta = 0;
  Letter inner = Letter::black;
  int chi = 0;
};

// Exact probability of one event under the peeling law.
Rational event_probability(const PeelEvent& e, const WeightTable& table);

// How the mixed boundary word changes.  Reads of position k+1 are done
// through a caller-supplied reader so the same rule table serves both the
// truncated chain (bounded words, reset on reads past the end) and the
// simulator (lazily materialized unbounded boundary).
struct UpdateAction {
  enum Kind {
    unchanged,
    prepend_black,        // (b) in front
    prepend_black_white,  // (b,o) in front
    prepend_black_black,  // (b,b) in front
    drop,                 // drop `count` leading letters
    drop_prepend_black,   // drop `count` letters, then (b) in front
    reset,                // bounded words only: replace by (b)
  };
  Kind kind = unchanged;
  long count = 0;

  friend bool operator==(const UpdateAction&, const UpdateAction&) = default;
};

inline constexpr long kUnboundedWidth = -1;

// width: current word length for the truncated chain, kUnboundedWidth for a
// boundary that can always be extended.  read_at(j) returns the Letter at
// position j (1-based) and is only called with j = left swallow + 1.
template <class Reader>
UpdateAction decide_update(const PeelEvent& e, const ColourDraw& d, long width,
                           Reader&& read_at) {
  const bool bounded = width != kUnboundedWidth;
  auto left_shift = [&](long k) -> UpdateAction {
    if (bounded && k >= width) return {UpdateAction::reset, 0};
    bool white = read_at(k + 1) == Letter::white;
    return {UpdateAction::drop, white ? k + 1 : k};
  };
  switch (e.type) {
    case EventType::three_fresh:
      if (d.zeta == 2) return {UpdateAction::unchanged, 0};
      if (d.zeta == 1) return {UpdateAction::prepend_black, 0};
      return {d.inner == Letter::white ? UpdateAction::prepend_black_white
                                       : UpdateAction::prepend_black_black,
              0};
    case EventType::self_parallel:
      return {UpdateAction::unchanged, 0};
    case EventType::right_one_fresh:
      return {d.chi ? UpdateAction::unchanged : UpdateAction::prepend_black,
              0};
    case EventType::right_no_fresh:
      return {UpdateAction::unchanged, 0};
    case EventType::left_one_fresh:
      if (bounded && e.left >= width) return {UpdateAction::reset, 0};
      if (d.chi) return left_shift(e.left);
      // a buried letter resurfaces at position 2: (b, w(k+1), ...)
      return {UpdateAction::drop_prepend_black, e.left};
    case EventType::left_no_fresh:
      return left_shift(e.left);
    case EventType::both_sides:
      return left_shift(e.left);
  }
  throw std::logic_error("decide_update: unreachable");
}

// Increment of the unstopped cluster-front proxy.
template <class Reader>
long shat_increment(const PeelEvent& e, const ColourDraw& d, Reader&& read_at) {
  auto left_white = [&](long k) -> long {
    return read_at(k + 1) == Letter::white ? 1 : 0;
  };
  switch (e.type) {
    case EventType::three_fresh: return d.zeta;
    case EventType::self_parallel: return 0;
    case EventType::right_one_fresh: return d.chi - e.right;
    case EventType::left_one_fresh:
      return d.chi ? 1 + left_white(e.left) : 0;
    case EventType::right_no_fresh: return -e.right;
    case EventType::left_no_fresh: return left_white(e.left);
    case EventType::both_sides: return left_white(e.left) - e.right;
  }
  throw std::logic_error("shat_increment: unreachable");
}

// Exact front bookkeeping; returns the new front size.  Any right swallow
// reaching the whole front (k >= S) seals the cluster, so the new size is 0
// regardless of the fresh colours.  Below the front the proxy increment is
// exact.
template <class Reader>
long s_increment_ground_truth(long s, const PeelEvent& e, const ColourDraw& d,
                              Reader&& read_at) {
  if (s < 1)
    throw std::logic_error("s_increment_ground_truth: front already closed");
  if (e.right >= s) return 0;
  return s + shat_increment(e, d, read_at);
}

}  // namespace quadperc
