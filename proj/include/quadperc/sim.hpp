#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "quadperc/events.hpp"
#include "quadperc/sim_weights.hpp"

namespace quadperc {

// Deterministic uniform doubles in [0,1) from mt19937_64; the top 53 bits
// are used directly so results do not depend on the standard library's
// distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// Replica seeds are derived from the master seed by iterating splitmix64;
// replica i uses the (i+1)-th output.
std::uint64_t replica_seed(std::uint64_t master, int replica);

enum class ExtensionPolicy { all_black, iid };

// Mixed boundary with a materialized prefix and lazy extension.  Letters
// past the prefix are drawn on first read (white with probability p under
// the iid policy, forced black after a white so the boundary stays
// admissible) and frozen afterwards.
class LazyBoundary {
 public:
  LazyBoundary(ExtensionPolicy policy, double p)
      : policy_(policy), p_(p), letters_{static_cast<std::uint8_t>(Letter::black)} {}

  Letter at(long j, Rng& rng) {  // 1-based
    ensure(j, rng);
    return static_cast<Letter>(letters_[j - 1]);
  }
  void ensure(long j, Rng& rng) {
    while (static_cast<long>(letters_.size()) < j) {
      bool prev_white = !letters_.empty() && letters_.back();
      bool white = false;
      if (policy_ == ExtensionPolicy::iid && !prev_white)
        white = rng.uniform() < p_;
      letters_.push_back(white ? 1 : 0);
    }
  }
  void drop(long k, Rng& rng) {
    ensure(k + 1, rng);
    letters_.erase(letters_.begin(), letters_.begin() + k);
  }
  void prepend(Letter l) {
    letters_.push_front(static_cast<std::uint8_t>(l));
  }
  void reset_single_black() {
    letters_.clear();
    letters_.push_back(0);
  }
  long materialized() const { return static_cast<long>(letters_.size()); }
  bool prefix_admissible() const {
    if (letters_.empty() || letters_[0]) return false;
    for (size_t i = 0; i + 1 < letters_.size(); ++i)
      if (letters_[i] && letters_[i + 1]) return false;
    return true;
  }

 private:
  ExtensionPolicy policy_;
  double p_;
  std::deque<std::uint8_t> letters_;
};

// One sampled peeling move.  A far flag marks a swallow beyond the table
// cutoff on that side; the swallow count in `event` is then clamped to the
// smallest index past the cutoff and the step routine applies the limiting
// behaviour (right: front destroyed; left: boundary reset).
struct SampledMove {
  PeelEvent event;
  ColourDraw draw;
  bool far_left = false;
  bool far_right = false;
};

// Samples (event, colours) from the exact peeling law restricted to swallow
// indices below the cutoff.  Even swallows and opposite-side swallows are
// drawn via the pocket decomposition q'_{2k} = q_{2k} + sum qq(k1,k2), so
// only the odd weight distribution is ever sampled.
class EventSampler {
 public:
  EventSampler(const FloatWeightTable& table, double p);

  SampledMove sample(Rng& rng) const;
  double residual_lump_mass() const { return table_->residual_sampler_total(); }
  const FloatWeightTable& table() const { return *table_; }
  double p() const { return p_; }

 private:
  const FloatWeightTable* table_;
  double p_;
  std::array<double, 8> class_cum_;  // cumulative class masses
  long clamp_odd_, clamp_even_;
};

struct SimState {
  LazyBoundary boundary;
  long long s = 1;      // ground-truth front size, frozen at 0
  long long s_hat = 1;  // unstopped proxy
  long long steps = 0;
  bool alive = true;

  SimState(ExtensionPolicy policy, double p) : boundary(policy, p) {}
};

struct StepInfo {
  EventType type;
  long long shat_increment = 0;
  bool killed = false;      // ground truth reached 0 this step
  bool divergence = false;  // proxy would have stayed positive at the kill
};

// Advances one peeling step: front bookkeeping first (reads against the
// pre-update boundary), then the boundary update.
StepInfo step(SimState& state, const EventSampler& sampler, Rng& rng);

enum class SimMode { drift, survival, marginals };

struct SimConfig {
  double p = 0.5;
  long long steps = 100000;
  int replicas = 1;
  std::uint64_t seed = 1;
  ExtensionPolicy policy = ExtensionPolicy::all_black;
  long cutoff = 1L << 20;
  SimMode mode = SimMode::drift;
  long long burnin = 10000;        // marginals mode
  int marginal_max_position = 4;   // track positions 2..this
  int batches_per_replica = 0;     // 0: choose so that total >= 20
  int threads = 0;                 // 0: one per replica up to hardware limit
  // Optional trajectory sink for replica 0: called as (n, S, S_hat).
  std::function<void(long long, long long, long long)> trajectory;
  long long trajectory_stride = 1000;
};

struct SimStats {
  // estimates
  double drift_mean = 0;
  double drift_ci_halfwidth = 0;              // 1.96 * se of batch means
  std::vector<double> drift_ci_sensitivity;   // halfwidths at B, B/2, B/4
  double survival_fraction = 0;
  std::vector<long long> death_time_histogram;  // log2 buckets
  std::map<int, double> marginal_freq;
  std::map<int, double> marginal_se;
  std::map<std::string, double> event_freq;
  long long proxy_divergence_count = 0;
  // bookkeeping
  int total_batches = 0;
  long long total_steps = 0;
  double residual_lump_mass = 0;

  friend bool operator==(const SimStats&, const SimStats&) = default;
};

SimStats run(const SimConfig& config, const FloatWeightTable& table);

const char* event_type_name(EventType t);

}  // namespace quadperc
