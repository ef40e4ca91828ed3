#include "jss/agents.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace jss {

namespace {

int first_legal(const ActionMask& mask) {
  for (int a = 0; a < mask.size(); ++a) {
    if (mask[a]) return a;
  }
  throw Error("observation has no legal action");
}

int sample(const Eigen::VectorXd& probs, const ActionMask& mask, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  int last = -1;
  for (int a = 0; a < probs.size(); ++a) {
    if (!mask[a]) continue;
    cumulative += probs[a];
    last = a;
    if (u < cumulative) return a;
  }
  if (last < 0) throw Error("observation has no legal action");
  return last;
}

}  // namespace

int PriorityRuleAgent::decide(const Observation& obs) {
  const int jobs = static_cast<int>(obs.features.rows());
  int best = -1;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < jobs; ++j) {
    if (!obs.mask[j]) continue;
    const double v = obs.features(j, feature_);
    if (v > best_value) {
      best = j;
      best_value = v;
    }
  }
  if (best >= 0) return best;
  if (obs.mask[jobs]) return jobs;
  throw Error(name_ + ": observation has no legal action");
}

std::unique_ptr<Agent> make_fifo_agent() { return std::make_unique<PriorityRuleAgent>(kIdleSinceLast, "fifo"); }
std::unique_ptr<Agent> make_mwkr_agent() { return std::make_unique<PriorityRuleAgent>(kWorkRemaining, "mwkr"); }

int RandomAgent::decide(const Observation& obs) {
  const int legal = obs.mask.count();
  if (legal == 0) throw Error("random: observation has no legal action");
  auto pick = static_cast<int>(rng_.below(static_cast<std::uint64_t>(legal)));
  for (int a = 0; a < obs.mask.size(); ++a) {
    if (obs.mask[a] && pick-- == 0) return a;
  }
  return first_legal(obs.mask);
}

Eigen::VectorXd masked_softmax(const Eigen::Ref<const Eigen::VectorXd>& scores, const ActionMask& mask) {
  if (scores.size() != mask.size()) throw Error("masked_softmax: scores and mask sizes differ");
  if (!mask.any()) throw Error("masked_softmax: no legal action");
  constexpr double kLowest = std::numeric_limits<double>::lowest();
  Eigen::VectorXd masked(scores.size());
  for (Eigen::Index a = 0; a < scores.size(); ++a) masked[a] = mask[static_cast<int>(a)] ? scores[a] : kLowest;
  const double top = masked.maxCoeff();
  // Vectorised exp does not flush huge negative inputs to zero, so masked
  // entries are zeroed explicitly.
  Eigen::VectorXd e = (masked.array() - top).exp().matrix();
  for (Eigen::Index a = 0; a < e.size(); ++a) {
    if (!mask[static_cast<int>(a)]) e[a] = 0.0;
  }
  return e / e.sum();
}

PrioritySoftmaxAgent::PrioritySoftmaxAgent(Feature feature, double temperature, std::uint64_t seed,
                                           double noop_value)
    : feature_(feature), temperature_(temperature), noop_value_(noop_value), rng_(seed) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error("softmax agent: temperature must be positive and finite");
  }
  if (feature != kWorkRemaining && feature != kIdleSinceLast) {
    throw Error("softmax agent: feature must be a4 or a6");
  }
}

std::string PrioritySoftmaxAgent::name() const {
  std::string t = std::to_string(temperature_);
  t.erase(t.find_last_not_of('0') + 1);
  if (t.back() == '.') t.pop_back();
  return std::string("softmax:") + (feature_ == kWorkRemaining ? "a4" : "a6") + ":" + t;
}

Eigen::VectorXd PrioritySoftmaxAgent::probabilities(const Observation& obs) const {
  const auto jobs = obs.features.rows();
  Eigen::VectorXd scores(jobs + 1);
  scores.head(jobs) = obs.features.col(feature_) / temperature_;
  scores[jobs] = noop_value_ / temperature_;
  return masked_softmax(scores, obs.mask);
}

int PrioritySoftmaxAgent::decide(const Observation& obs) { return sample(probabilities(obs), obs.mask, rng_); }

std::unique_ptr<Agent> PrioritySoftmaxAgent::greedy_counterpart() const {
  return feature_ == kWorkRemaining ? make_mwkr_agent() : make_fifo_agent();
}

std::unique_ptr<Agent> make_agent(const std::string& spec, std::uint64_t seed) {
  if (spec == "fifo") return make_fifo_agent();
  if (spec == "mwkr") return make_mwkr_agent();
  if (spec == "random") return std::make_unique<RandomAgent>(seed);
  if (spec.rfind("softmax:", 0) == 0) {
    const auto rest = spec.substr(8);
    const auto colon = rest.find(':');
    const auto feature_name = rest.substr(0, colon);
    Feature feature;
    if (feature_name == "a4") {
      feature = kWorkRemaining;
    } else if (feature_name == "a6") {
      feature = kIdleSinceLast;
    } else {
      throw Error("unknown softmax feature '" + feature_name + "' in agent spec '" + spec + "'");
    }
    double temperature = 1.0;
    if (colon != std::string::npos) {
      try {
        std::size_t used = 0;
        temperature = std::stod(rest.substr(colon + 1), &used);
        if (used != rest.size() - colon - 1) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw Error("bad temperature in agent spec '" + spec + "'");
      }
    }
    return std::make_unique<PrioritySoftmaxAgent>(feature, temperature, seed);
  }
  throw Error("unknown agent '" + spec + "'");
}

RolloutResult rollout(std::shared_ptr<const EnvModel> model, Agent& agent, TrajectoryRecorder* recorder) {
  EnvState state(model);
  RolloutResult result;
  if (recorder) recorder->record_reset(state);
  Observation obs = state.observe();
  while (!state.is_done()) {
    const int action = agent.decide(obs);
    if (action < 0 || action >= obs.mask.size() || !obs.mask[action]) {
      throw IllegalActionError(agent.name() + " chose illegal action " + std::to_string(action));
    }
    auto outcome = state.step(action);
    ++result.steps;
    if (action == state.noop_action()) ++result.noops;
    if (recorder) recorder->record_step(result.steps, action, outcome, state);
    obs = std::move(outcome.observation);
  }
  result.schedule = extract_schedule(state);
  result.makespan = state.makespan();
  result.raw_reward = state.cumulative_raw_reward();
  result.scaled_reward = state.cumulative_reward();
  const auto report = validate_schedule(model->instance, result.schedule);
  if (!report.valid || report.makespan != result.makespan) {
    throw Error("rollout produced an invalid schedule: " +
                (report.violations.empty() ? std::string("makespan mismatch") : report.violations.front().detail));
  }
  return result;
}

RolloutResult rollout(const Instance& inst, Agent& agent, const EnvConfig& config) {
  return rollout(std::make_shared<const EnvModel>(inst, config), agent);
}

SearchResult best_of_search(const Instance& inst, const Agent& agent, const SearchOptions& options) {
  if (!(options.budget_seconds > 0.0)) throw Error("best_of_search: budget must be positive");
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                                 std::chrono::duration<double>(options.budget_seconds));
  const auto model = std::make_shared<const EnvModel>(inst, options.env);

  SearchResult result;
  std::mutex mu;
  auto offer = [&](RolloutResult&& r) {
    std::lock_guard lock(mu);
    result.makespan_history.push_back(r.makespan);
    result.steps += static_cast<std::uint64_t>(r.steps);
    ++result.episodes;
    if (result.episodes == 1 || r.makespan < result.best_makespan) {
      result.best_makespan = r.makespan;
      result.best_schedule = std::move(r.schedule);
    }
  };

  std::atomic<std::uint64_t> started{1};
  auto budget_left = [&] {
    if (Clock::now() >= deadline) return false;
    if (options.max_episodes == 0) return true;
    return started.fetch_add(1) < options.max_episodes;
  };

  // Episode one: the deterministic rule this agent relaxes.
  if (auto greedy = agent.greedy_counterpart()) {
    offer(rollout(model, *greedy));
  } else {
    auto first = agent.clone();
    first->reseed(options.seed);
    offer(rollout(model, *first));
  }

  const int workers = std::max(1, options.workers);
  auto work = [&](int w) {
    auto local = agent.clone();
    local->reseed(options.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(w + 1));
    while (budget_left()) offer(rollout(model, *local));
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  result.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
  return result;
}

}  // namespace jss
