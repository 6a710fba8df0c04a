#include "migrationlab/game.hpp"
#include "migrationlab/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "migrationlab/constants.hpp"
#include "migrationlab/instance.hpp"

namespace migrationlab {

long GameParams::phase_requests() const {
  const double factor = c > 0 ? c : paper_constants().c0;
  return round_count(factor * D);
}

double GameParams::c_eff() const {
  return static_cast<double>(phase_requests()) / static_cast<double>(D);
}

std::string GameState::describe() const {
  switch (tag) {
    case StateTag::kStart: return "S";
    case StateTag::kLevel: return "A" + std::to_string(level);
    case StateTag::kFar: return "F";
  }
  return "?";
}

double epsilon_bound(int L, int k) {
  if (L < 1 || k < 3) throw std::invalid_argument("epsilon needs L >= 1 and k >= 3");
  const auto& pc = paper_constants();
  const double two_alpha = 2.0 * pc.alpha;
  const double tail = std::pow(two_alpha, L) / (1.0 - two_alpha);
  const double per_k = 4.0 * pc.R0 / (static_cast<double>(k) + 4.0);
  return std::max(tail, per_k);
}

namespace {

double geometric_sum(double q, int terms) {
  double sum = 0.0;
  double power = 1.0;
  for (int i = 0; i < terms; ++i) {
    sum += power;
    power *= q;
  }
  return sum;
}

double lc_value(double c, double a) {
  return std::max({a / (1.0 - a), (c + 2.0) / (c * a) + 1.0, c * (a + 1.0) + 1.0});
}

}  // namespace

double L_of_c(double c) {
  if (c <= 0) throw std::invalid_argument("phase factor must be positive");
  // max{increasing, decreasing, increasing} in a is quasi-convex: coarse grid
  // to bracket the minimum, then ternary refinement.
  const int grid = 4096;
  int best = 1;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 1; i < grid; ++i) {
    const double a = static_cast<double>(i) / grid;
    const double value = lc_value(c, a);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  double lo = static_cast<double>(best - 1) / grid;
  double hi = static_cast<double>(best + 1) / grid;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (lc_value(c, m1) <= lc_value(c, m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return lc_value(c, 0.5 * (lo + hi));
}

std::pair<double, double> min_L_of_c() {
  double best_c = 1.0;
  double best_value = std::numeric_limits<double>::infinity();
  for (double c = 0.05; c <= 8.0; c += 0.002) {
    const double value = L_of_c(c);
    if (value < best_value) {
      best_value = value;
      best_c = c;
    }
  }
  double lo = best_c - 0.002;
  double hi = best_c + 0.002;
  for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (L_of_c(m1) <= L_of_c(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  best_c = 0.5 * (lo + hi);
  return {best_c, L_of_c(best_c)};
}

PlayOutcome linear_play(const PhaseMoveRule& rule, const GameParams& params) {
  const auto& pc = paper_constants();
  const double D = params.D;
  const long phase_len = params.phase_requests();
  // Rounding the far block up keeps the simulated gains above the closed-form
  // bound at finite D.
  const long at_b = static_cast<long>(std::ceil(pc.tLin * D));
  const long at_a = phase_len - at_b;
  if (at_a < 0) throw std::invalid_argument("linear play needs c_eff > t = 1 + 1/R0");

  Eigen::MatrixXd dist(2, 2);
  dist << 0, 1, 1, 0;
  MetricSpace space({"a", "b"}, dist, params.D);
  RequestMultiset requests;
  if (at_a > 0) requests.add(0, at_a);
  requests.add(1, at_b);

  const PointId target = rule(space, 0, requests);
  space.require_id(target);

  PlayOutcome play;
  play.kind = "linear";
  play.state_in = GameState::start();
  const double eps = epsilon_bound(params.L, params.k);
  if (target == 1) {
    // The policy crossed; OPT stays home and only pays for the far requests.
    play.c_alg = static_cast<double>(at_b) + D;
    play.c_opt = static_cast<double>(at_b);
  } else {
    // The policy stays; OPT crosses before the far block and serves it free.
    play.c_alg = static_cast<double>(at_b);
    play.c_opt = D;
  }
  play.gain = play.c_alg - (pc.R0 - eps) * play.c_opt;
  play.lemma_bound = -geometric_sum(2.0 * pc.alpha, params.L) * D;
  play.state_out = {StateTag::kLevel, 0, 1.0};
  return play;
}

PlayOutcome bipartite_play(const PhaseMoveRule& rule, const GameParams& params, int level,
                           std::mt19937_64* rng) {
  if (level < 0 || level >= params.L) {
    throw std::invalid_argument("bipartite play needs a level in [0, L)");
  }
  const auto& pc = paper_constants();
  const double alpha = pc.alpha;
  const double f = std::pow(2.0 * alpha, level);
  const int k = params.k;
  const double D = params.D;

  Instance inst = bipartite_instance(k, f, params.c_eff(), params.D);
  const MetricSpace& space = inst.space;
  const long phase_len = static_cast<long>(inst.requests.size());
  const RequestMultiset requests = RequestMultiset::from_points(inst.requests);

  const PointId target = rule(space, 0, requests);
  space.require_id(target);

  // Requests per S-node; OPT sits at one Q-node all phase and pays 3*alpha*f
  // only for its non-neighbor's requests.
  std::vector<long> per_node(static_cast<size_t>(k), 0);
  for (const auto& [p, cnt] : requests.counts()) {
    if (p >= 1 + k) per_node[static_cast<size_t>(p - 1 - k)] += cnt;
  }
  auto opt_cost_at = [&](int q_index) {
    const long m = per_node[static_cast<size_t>(q_index)];
    return alpha * f * static_cast<double>(phase_len - m) +
           3.0 * alpha * f * static_cast<double>(m);
  };
  auto cheapest_q = [&](int excluded) {
    long best_m = std::numeric_limits<long>::max();
    for (int j = 0; j < k; ++j) {
      if (j == excluded) continue;
      best_m = std::min(best_m, per_node[static_cast<size_t>(j)]);
    }
    std::vector<int> candidates;
    for (int j = 0; j < k; ++j) {
      if (j != excluded && per_node[static_cast<size_t>(j)] == best_m) candidates.push_back(j);
    }
    if (rng != nullptr && candidates.size() > 1) {
      std::uniform_int_distribution<size_t> pick(0, candidates.size() - 1);
      return candidates[pick(*rng)];
    }
    return candidates.front();
  };

  PlayOutcome play;
  play.kind = "bipartite";
  play.state_in = {StateTag::kLevel, level, f};
  const double serve = (1.0 + alpha) * f * static_cast<double>(phase_len);
  int opt_home;
  if (target == 0) {
    opt_home = cheapest_q(-1);
    play.c_alg = serve;
    play.state_out = {StateTag::kLevel, level, f};
    play.lemma_bound = 0.0;
  } else if (target <= k) {
    opt_home = cheapest_q(target - 1);
    play.c_alg = serve + f * D;
    play.state_out = {StateTag::kLevel, level + 1, 2.0 * alpha * f};
    play.lemma_bound = f * D;
  } else {
    opt_home = target - 1 - k;  // the only Q-node not adjacent to the target
    play.c_alg = serve + (1.0 + alpha) * f * D;
    play.state_out = {StateTag::kFar, 0, 3.0 * alpha * f};
    play.lemma_bound = (1.0 + alpha) * f * D;
  }
  play.c_opt = opt_cost_at(opt_home);
  play.gain = play.c_alg - (pc.R0 - epsilon_bound(params.L, params.k)) * play.c_opt;
  return play;
}

PlayOutcome finishing_play(const PhaseMoveRule& rule, const GameParams& params, double f,
                           int max_phases) {
  if (f <= 0) throw std::invalid_argument("finishing play needs a positive distance");
  const long phase_len = params.phase_requests();

  Eigen::MatrixXd dist(2, 2);
  dist << 0, f, f, 0;
  MetricSpace space({"v_alg", "v_opt"}, dist, params.D);
  RequestMultiset requests;
  requests.add(1, phase_len);

  PlayOutcome play;
  play.kind = "finishing";
  play.state_in = {StateTag::kFar, 0, f};
  int phases = 0;
  double serve = 0.0;
  while (true) {
    if (++phases > max_phases) {
      throw NonCompetitivePolicyError(
          "policy never migrated to the opponent during " + std::to_string(max_phases) +
          " free-for-OPT phases");
    }
    serve += static_cast<double>(phase_len) * f;
    if (rule(space, 0, requests) == 1) break;
  }
  play.phases_used = phases;
  play.c_alg = serve + f * params.D;
  play.c_opt = 0.0;
  play.gain = play.c_alg;
  play.lemma_bound = (params.c_eff() + 1.0) * f * params.D;
  play.state_out = GameState::start();
  return play;
}

EpochLedger run_epochs(const PhaseMoveRule& rule, const GameParams& params, int num_epochs,
                       std::uint64_t seed, int loop_cap) {
  if (num_epochs < 1) throw std::invalid_argument("need at least one epoch");
  const auto& pc = paper_constants();
  std::mt19937_64 rng(seed);

  EpochLedger ledger;
  ledger.epochs = num_epochs;
  ledger.epsilon = epsilon_bound(params.L, params.k);
  ledger.below_cT = params.c_eff() < pc.cT - 1e-12;
  ledger.min_bound_slack = std::numeric_limits<double>::infinity();

  auto record = [&](PlayOutcome play) {
    ledger.total_alg += play.c_alg;
    ledger.total_opt += play.c_opt;
    ledger.min_bound_slack = std::min(ledger.min_bound_slack, play.gain - play.lemma_bound);
    const bool loop = play.kind == "bipartite" && play.state_out.tag == StateTag::kLevel &&
                      play.state_out.level == play.state_in.level;
    if (!loop) ledger.transition_opt_cost += play.c_opt;
    GameState out = play.state_out;
    ledger.plays.push_back(std::move(play));
    return out;
  };

  auto finish_from = [&](const GameState& state) {
    PlayOutcome play = finishing_play(rule, params, state.dist);
    play.state_in = state;
    return record(std::move(play));
  };

  for (int epoch = 0; epoch < num_epochs; ++epoch) {
    GameState state = record(linear_play(rule, params));
    int loops_here = 0;
    while (state.tag != StateTag::kStart) {
      if (state.tag == StateTag::kFar) {
        state = finish_from(state);
      } else if (state.level >= params.L || loops_here > loop_cap) {
        if (state.level < params.L) ledger.forced_finish = true;
        state = finish_from(state);
      } else {
        const int level_before = state.level;
        state = record(bipartite_play(rule, params, state.level, &rng));
        if (state.tag == StateTag::kLevel && state.level == level_before) {
          ++loops_here;
        } else {
          loops_here = 0;
        }
      }
    }
  }
  ledger.realized_ratio =
      ledger.total_opt > 0 ? ledger.total_alg / ledger.total_opt
                           : std::numeric_limits<double>::infinity();
  return ledger;
}

StateGraphReport verify_state_graph(int L, double c) {
  if (L < 1) throw std::invalid_argument("L must be >= 1");
  const auto& pc = paper_constants();
  const double alpha = pc.alpha;
  const double two_alpha = 2.0 * alpha;

  StateGraphReport report;
  report.case1_telescope = geometric_sum(two_alpha, L) - geometric_sum(two_alpha, L);
  report.case1_with_finishing =
      report.case1_telescope + (c + 1.0) * std::pow(two_alpha, L);
  report.case2_closed_form =
      (1.0 + alpha) + (c + 1.0) * 3.0 * alpha - 1.0 / (1.0 - two_alpha);

  double case2_min = std::numeric_limits<double>::infinity();
  for (int m = 0; m < L; ++m) {
    const double value =
        std::pow(two_alpha, m) *
        ((1.0 + alpha) + (c + 1.0) * 3.0 * alpha - geometric_sum(two_alpha, L - m));
    case2_min = std::min(case2_min, value);
  }
  report.case2_min = case2_min;
  report.min_closed_path_gain =
      std::min({report.case1_telescope, report.case1_with_finishing, report.case2_min});
  return report;
}

nlohmann::ordered_json epoch_ledger_json(const EpochLedger& ledger, const GameParams& params) {
  nlohmann::ordered_json j;
  j["L"] = params.L;
  j["k"] = params.k;
  j["c_eff"] = params.c_eff();
  j["D"] = params.D;
  j["epochs"] = ledger.epochs;
  j["epsilon"] = ledger.epsilon;
  j["total_alg"] = ledger.total_alg;
  j["total_opt"] = ledger.total_opt;
  j["realized_ratio"] = ledger.realized_ratio;
  j["min_bound_slack"] = ledger.min_bound_slack;
  j["transition_opt_cost"] = ledger.transition_opt_cost;
  j["below_cT"] = ledger.below_cT;
  j["forced_finish"] = ledger.forced_finish;
  auto& plays = j["plays"] = nlohmann::ordered_json::array();
  for (const PlayOutcome& play : ledger.plays) {
    plays.push_back({{"kind", play.kind},
                     {"state_in", play.state_in.describe()},
                     {"state_out", play.state_out.describe()},
                     {"c_alg", play.c_alg},
                     {"c_opt", play.c_opt},
                     {"gain", play.gain},
                     {"lemma_bound", play.lemma_bound},
                     {"phases_used", play.phases_used}});
  }
  return j;
}

void write_epochs_json(const EpochLedger& ledger, const GameParams& params, std::ostream& out) {
  out << epoch_ledger_json(ledger, params).dump(2) << "\n";
}

void write_epochs_csv(const EpochLedger& ledger, std::ostream& out) {
  out << "play,kind,state_in,state_out,c_alg,c_opt,gain,lemma_bound,phases_used\n";
  for (size_t i = 0; i < ledger.plays.size(); ++i) {
    const PlayOutcome& play = ledger.plays[i];
    out << i << ',' << play.kind << ',' << play.state_in.describe() << ','
        << play.state_out.describe() << ',' << play.c_alg << ',' << play.c_opt << ','
        << play.gain << ',' << play.lemma_bound << ',' << play.phases_used << "\n";
  }
}

}  // namespace migrationlab
