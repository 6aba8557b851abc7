#include "quadperc/word.hpp"

#include <algorithm>
#include <stdexcept>

namespace quadperc {

BoundaryWord apply_action(const BoundaryWord& w, const UpdateAction& a,
                          long capacity) {
  BoundaryWord out;
  switch (a.kind) {
    case UpdateAction::unchanged:
      out = w;
      break;
    case UpdateAction::prepend_black:
      out = w.prepended(Letter::black);
      break;
    case UpdateAction::prepend_black_white:
      out = w.prepended(Letter::white).prepended(Letter::black);
      break;
    case UpdateAction::prepend_black_black:
      out = w.prepended(Letter::black).prepended(Letter::black);
      break;
    case UpdateAction::drop:
      out = w.dropped(a.count);
      break;
    case UpdateAction::drop_prepend_black:
      out = w.dropped(a.count).prepended(Letter::black);
      break;
    case UpdateAction::reset:
      out = BoundaryWord::single_black();
      break;
  }
  return out.truncated(capacity);
}

StateSpace::StateSpace(long capacity) : capacity_(capacity) {
  if (capacity < 1 || capacity > BoundaryWord::kMaxLen)
    throw std::domain_error("StateSpace: capacity out of range");
  // Depth-first with black tried before white yields lexicographic order
  // (position 1 most significant) within each length block.
  for (long len = 1; len <= capacity; ++len) {
    auto emit = [&](const BoundaryWord& w) {
      index_.emplace(w.key(), static_cast<long>(states_.size()));
      states_.push_back(w);
    };
    auto rec = [&](auto&& self, std::uint32_t bits, long pos) -> void {
      if (pos > len) {
        emit({bits, static_cast<std::uint8_t>(len)});
        return;
      }
      self(self, bits, pos + 1);  // black at pos
      bool prev_white = pos >= 2 && ((bits >> (pos - 2)) & 1u);
      if (pos >= 2 && !prev_white)
        self(self, bits | (1u << (pos - 1)), pos + 1);
    };
    rec(rec, 0u, 1);
  }
}

long StateSpace::index(const BoundaryWord& w) const {
  auto it = index_.find(w.key());
  if (it == index_.end())
    throw std::invalid_argument("StateSpace: word not in space");
  return it->second;
}

}  // namespace quadperc
