#include "quadperc/events.hpp"

namespace quadperc {

Rational event_probability(const PeelEvent& e, const WeightTable& table) {
  switch (e.type) {
    case EventType::three_fresh:
      return table.q(-1);
    case EventType::self_parallel:
      return table.selfparallel_mass();
    case EventType::right_one_fresh:
      return table.q(e.right);
    case EventType::left_one_fresh:
      return table.q(e.left);
    case EventType::right_no_fresh:
      return table.qprime(e.right);
    case EventType::left_no_fresh:
      return table.qprime(e.left);
    case EventType::both_sides:
      return table.qq(e.right, e.left);
  }
  throw std::logic_error("event_probability: unreachable");
}

}  // namespace quadperc
