#include "quadperc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace quadperc {

std::uint64_t replica_seed(std::uint64_t master, int replica) {
  std::uint64_t z = master;
  for (int i = 0; i <= replica; ++i) {
    z += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = z;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x = x ^ (x >> 31);
    if (i == replica) return x;
  }
  return z;
}

namespace {

// Event classes in sampling order; the pocket pairs realize the q' and
// opposite-side laws from two odd draws.
enum Class : int {
  c_three = 0,
  c_self,
  c_rof,
  c_lof,
  c_res,
  c_les,
  c_pair_rr,
  c_pair_ll,
  c_pair_rl,
};

}  // namespace

EventSampler::EventSampler(const FloatWeightTable& table, double p)
    : table_(&table), p_(p) {
  const double masses[9] = {
      3.0 / 8.0,   // three_fresh
      2.0 / 9.0,   // self_parallel
      1.0 / 8.0,   // right_one_fresh
      1.0 / 8.0,   // left_one_fresh
      1.0 / 72.0,  // right even single pocket
      1.0 / 72.0,  // left even single pocket
      1.0 / 24.0,  // two right pockets
      1.0 / 24.0,  // two left pockets
      1.0 / 24.0,  // opposite pockets (right, left)
  };
  double acc = 0;
  for (int i = 0; i < 8; ++i) {
    acc += masses[i];
    class_cum_[i] = acc;
  }
  long max_odd = table.max_odd();
  clamp_odd_ = max_odd + 2;
  clamp_even_ = max_odd + 3;
}

SampledMove EventSampler::sample(Rng& rng) const {
  double u = rng.uniform();
  int cls = 0;
  while (cls < 8 && u >= class_cum_[cls]) ++cls;

  SampledMove mv{PeelEvent::self_parallel(), {}, false, false};
  auto draw_odd = [&](bool& far) {
    long k = table_->sample_odd(rng.uniform());
    if (k < 0) {
      far = true;
      return clamp_odd_;
    }
    return k;
  };
  auto draw_even_single = [&](bool& far) {
    long k = table_->sample_odd_min3(rng.uniform());
    if (k < 0) {
      far = true;
      return clamp_even_;
    }
    return k - 1;
  };

  switch (cls) {
    case c_three: {
      double v = rng.uniform();
      if (v < 1.0 - p_) {
        mv.draw.zeta = 0;
        mv.draw.inner =
            rng.uniform() < p_ ? Letter::white : Letter::black;
      } else if (v < 1.0 - p_ * p_) {
        mv.draw.zeta = 1;
      } else {
        mv.draw.zeta = 2;
      }
      mv.event = PeelEvent::three_fresh();
      break;
    }
    case c_self:
      mv.event = PeelEvent::self_parallel();
      break;
    case c_rof: {
      long k = draw_odd(mv.far_right);
      mv.event = PeelEvent::right_one_fresh(k);
      mv.draw.chi = rng.uniform() < p_ ? 1 : 0;
      break;
    }
    case c_lof: {
      long k = draw_odd(mv.far_left);
      mv.event = PeelEvent::left_one_fresh(k);
      mv.draw.chi = rng.uniform() < p_ ? 1 : 0;
      break;
    }
    case c_res: {
      long k = draw_even_single(mv.far_right);
      mv.event = PeelEvent::right_no_fresh(k);
      break;
    }
    case c_les: {
      long k = draw_even_single(mv.far_left);
      mv.event = PeelEvent::left_no_fresh(k);
      break;
    }
    case c_pair_rr: {
      long k1 = draw_odd(mv.far_right);
      long k2 = draw_odd(mv.far_right);
      mv.event = PeelEvent::right_no_fresh(k1 + k2);
      break;
    }
    case c_pair_ll: {
      long k1 = draw_odd(mv.far_left);
      long k2 = draw_odd(mv.far_left);
      mv.event = PeelEvent::left_no_fresh(k1 + k2);
      break;
    }
    default: {
      long kr = draw_odd(mv.far_right);
      long kl = draw_odd(mv.far_left);
      mv.event = PeelEvent::both_sides(kr, kl);
      break;
    }
  }
  return mv;
}

const char* event_type_name(EventType t) {
  switch (t) {
    case EventType::three_fresh: return "three_fresh";
    case EventType::self_parallel: return "self_parallel";
    case EventType::right_one_fresh: return "right_one_fresh";
    case EventType::left_one_fresh: return "left_one_fresh";
    case EventType::right_no_fresh: return "right_no_fresh";
    case EventType::left_no_fresh: return "left_no_fresh";
    case EventType::both_sides: return "both_sides";
  }
  return "?";
}

StepInfo step(SimState& state, const EventSampler& sampler, Rng& rng) {
  SampledMove mv = sampler.sample(rng);
  StepInfo info{mv.event.type};

  // Reads resolve against the pre-update boundary; a far-left swallow
  // behaves as an all-black read (its true mass is below the residual lump).
  auto read = [&](long j) -> Letter {
    if (mv.far_left) return Letter::black;
    return state.boundary.at(j, rng);
  };

  long long inc = shat_increment(mv.event, mv.draw, read);
  info.shat_increment = inc;
  state.s_hat += inc;

  if (state.alive) {
    long long new_s;
    if (mv.far_right || mv.event.right >= state.s) {
      new_s = 0;
      info.divergence = state.s + inc > 0;
    } else {
      new_s = state.s + inc;
    }
    if (new_s == 0) {
      info.killed = true;
      state.alive = false;
    }
    state.s = new_s;
  }

  if (mv.far_left) {
    state.boundary.reset_single_black();
  } else {
    UpdateAction action =
        decide_update(mv.event, mv.draw, kUnboundedWidth, read);
    switch (action.kind) {
      case UpdateAction::unchanged:
        break;
      case UpdateAction::prepend_black:
        state.boundary.prepend(Letter::black);
        break;
      case UpdateAction::prepend_black_white:
        state.boundary.prepend(Letter::white);
        state.boundary.prepend(Letter::black);
        break;
      case UpdateAction::prepend_black_black:
        state.boundary.prepend(Letter::black);
        state.boundary.prepend(Letter::black);
        break;
      case UpdateAction::drop:
        state.boundary.drop(action.count, rng);
        break;
      case UpdateAction::drop_prepend_black:
        state.boundary.drop(action.count, rng);
        state.boundary.prepend(Letter::black);
        break;
      case UpdateAction::reset:
        state.boundary.reset_single_black();
        break;
    }
  }

  ++state.steps;
  return info;
}

namespace {

struct ReplicaResult {
  long long steps_run = 0;
  long long shat_delta = 0;
  std::vector<double> batch_means;  // drift or per-position marginal batches
  std::vector<std::vector<double>> marginal_batches;  // [pos-2][batch]
  std::array<long long, 7> event_counts{};
  long long divergences = 0;
  bool alive_at_end = true;
  long long death_step = -1;
};

ReplicaResult run_replica(const SimConfig& cfg, const EventSampler& sampler,
                          int replica) {
  ReplicaResult res;
  Rng rng(replica_seed(cfg.seed, replica));
  SimState state(cfg.policy, cfg.p);

  const bool dump = replica == 0 && cfg.trajectory != nullptr;
  const int positions =
      std::max(2, cfg.marginal_max_position);

  long long batches =
      cfg.batches_per_replica > 0
          ? cfg.batches_per_replica
          : std::max<long long>(1, (20 + cfg.replicas - 1) / cfg.replicas);
  long long measured = cfg.mode == SimMode::marginals
                           ? std::max<long long>(0, cfg.steps - cfg.burnin)
                           : cfg.steps;
  long long batch_len = std::max<long long>(1, measured / batches);

  if (cfg.mode == SimMode::marginals)
    res.marginal_batches.assign(positions - 1, {});

  long long batch_acc = 0;
  std::vector<long long> marg_acc(positions - 1, 0);
  long long in_batch = 0;

  if (dump) cfg.trajectory(0, state.s, state.s_hat);
  for (long long n = 0; n < cfg.steps; ++n) {
    if (cfg.mode == SimMode::survival && !state.alive) break;

    StepInfo info = step(state, sampler, rng);
    res.event_counts[static_cast<int>(info.type)]++;
    if (info.divergence) res.divergences++;
    if (info.killed) res.death_step = state.steps;
    if (dump && (state.steps % cfg.trajectory_stride == 0 || info.killed))
      cfg.trajectory(state.steps, state.s, state.s_hat);

    bool measuring = cfg.mode != SimMode::marginals || n >= cfg.burnin;
    if (measuring) {
      if (cfg.mode == SimMode::marginals) {
        for (int j = 2; j <= positions; ++j)
          marg_acc[j - 2] +=
              state.boundary.at(j, rng) == Letter::white ? 1 : 0;
      } else {
        batch_acc += info.shat_increment;
      }
      if (++in_batch == batch_len &&
          static_cast<long long>(cfg.mode == SimMode::marginals
                                     ? res.marginal_batches[0].size()
                                     : res.batch_means.size()) < batches) {
        if (cfg.mode == SimMode::marginals) {
          for (int i = 0; i < positions - 1; ++i) {
            res.marginal_batches[i].push_back(
                static_cast<double>(marg_acc[i]) /
                static_cast<double>(batch_len));
            marg_acc[i] = 0;
          }
        } else {
          res.batch_means.push_back(static_cast<double>(batch_acc) /
                                    static_cast<double>(batch_len));
          batch_acc = 0;
        }
        in_batch = 0;
      }
    }
  }

  res.steps_run = state.steps;
  res.shat_delta = state.s_hat - 1;
  res.alive_at_end = state.alive;
  return res;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Standard error of the mean from batch means.
double batch_se(const std::vector<double>& batches) {
  size_t b = batches.size();
  if (b < 2) return 0;
  double m = mean_of(batches);
  double ss = 0;
  for (double x : batches) ss += (x - m) * (x - m);
  double var = ss / static_cast<double>(b - 1);
  return std::sqrt(var / static_cast<double>(b));
}

std::vector<double> merge_pairs(const std::vector<double>& v) {
  std::vector<double> out;
  for (size_t i = 0; i + 1 < v.size(); i += 2)
    out.push_back(0.5 * (v[i] + v[i + 1]));
  return out;
}

}  // namespace

SimStats run(const SimConfig& cfg, const FloatWeightTable& table) {
  EventSampler sampler(table, cfg.p);
  std::vector<ReplicaResult> results(cfg.replicas);

  int threads = cfg.threads > 0
                    ? cfg.threads
                    : static_cast<int>(std::min<unsigned>(
                          cfg.replicas,
                          std::max(1u, std::thread::hardware_concurrency())));
  threads = std::min<int>(threads, cfg.replicas);

  int first = 0;
  if (cfg.trajectory != nullptr) {
    results[0] = run_replica(cfg, sampler, 0);
    first = 1;
  }
  if (threads <= 1) {
    for (int r = first; r < cfg.replicas; ++r)
      results[r] = run_replica(cfg, sampler, r);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{first};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < cfg.replicas;
             r = next.fetch_add(1))
          results[r] = run_replica(cfg, sampler, r);
      });
    for (auto& th : pool) th.join();
  }

  SimStats stats;
  stats.residual_lump_mass = sampler.residual_lump_mass();

  long long total_steps = 0, shat_total = 0, events_total = 0;
  std::array<long long, 7> counts{};
  std::vector<double> drift_batches;
  int positions = std::max(2, cfg.marginal_max_position);
  std::vector<std::vector<double>> marg_batches(positions - 1);
  long long deaths = 0, alive = 0;
  stats.death_time_histogram.assign(64, 0);

  for (const auto& r : results) {
    total_steps += r.steps_run;
    shat_total += r.shat_delta;
    stats.proxy_divergence_count += r.divergences;
    for (int i = 0; i < 7; ++i) counts[i] += r.event_counts[i];
    for (double b : r.batch_means) drift_batches.push_back(b);
    for (int i = 0; i < static_cast<int>(r.marginal_batches.size()); ++i)
      for (double b : r.marginal_batches[i]) marg_batches[i].push_back(b);
    if (r.alive_at_end)
      ++alive;
    else {
      ++deaths;
      int bucket = 0;
      long long d = std::max<long long>(1, r.death_step);
      while (d > 1) {
        d >>= 1;
        ++bucket;
      }
      stats.death_time_histogram[bucket]++;
    }
  }
  stats.total_steps = total_steps;
  for (int i = 0; i < 7; ++i) events_total += counts[i];
  for (int i = 0; i < 7; ++i)
    stats.event_freq[event_type_name(static_cast<EventType>(i))] =
        events_total ? static_cast<double>(counts[i]) /
                           static_cast<double>(events_total)
                     : 0.0;

  switch (cfg.mode) {
    case SimMode::drift: {
      stats.drift_mean = total_steps
                             ? static_cast<double>(shat_total) /
                                   static_cast<double>(total_steps)
                             : 0.0;
      stats.total_batches = static_cast<int>(drift_batches.size());
      double se = batch_se(drift_batches);
      stats.drift_ci_halfwidth = 1.96 * se;
      std::vector<double> b = drift_batches;
      for (int level = 0; level < 3 && b.size() >= 4; ++level) {
        stats.drift_ci_sensitivity.push_back(1.96 * batch_se(b));
        b = merge_pairs(b);
      }
      break;
    }
    case SimMode::survival: {
      stats.survival_fraction =
          cfg.replicas ? static_cast<double>(alive) /
                             static_cast<double>(cfg.replicas)
                       : 0.0;
      break;
    }
    case SimMode::marginals: {
      stats.total_batches = static_cast<int>(marg_batches[0].size());
      for (int j = 2; j <= positions; ++j) {
        stats.marginal_freq[j] = mean_of(marg_batches[j - 2]);
        stats.marginal_se[j] = batch_se(marg_batches[j - 2]);
      }
      break;
    }
  }
  return stats;
}

}  // namespace quadperc
