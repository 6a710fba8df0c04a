#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "migrationlab/policy.hpp"

namespace migrationlab {

/// Raised by the finishing play when a policy refuses to migrate to the
/// opponent's node within the phase budget; only a non-competitive policy
/// can do that, since the opponent pays nothing.
class NonCompetitivePolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adversary game configuration. Phase length is round(c*D) requests; the
/// closed-form play bounds are evaluated at the effective ratio
/// c_eff = round(c*D)/D, which is what the algorithm actually plays.
struct GameParams {
  int L = 8;
  int k = 50;
  double c = 0.0;  ///< defaults to the MTLM phase factor c0 when <= 0
  int D = 100;

  long phase_requests() const;
  double c_eff() const;
};

enum class StateTag { kStart, kLevel, kFar };

/// Between-phase state of the game: only the distance between the two files
/// survives a graph rebuild.
struct GameState {
  StateTag tag = StateTag::kStart;
  int level = 0;    ///< meaningful for kLevel: distance (2 alpha)^level
  double dist = 0;  ///< current d(v_alg, v_opt)

  static GameState start() { return {StateTag::kStart, 0, 0.0}; }
  std::string describe() const;
};

struct PlayOutcome {
  std::string kind;  ///< linear | bipartite | finishing
  GameState state_in, state_out;
  double c_alg = 0.0;
  double c_opt = 0.0;
  double gain = 0.0;         ///< c_alg - (R0 - eps) * c_opt
  double lemma_bound = 0.0;  ///< the play's closed-form gain bound
  int phases_used = 1;
};

/// eps(L,k) = max{ (2 alpha)^L / (1 - 2 alpha), 4 R0 / (k+4) }.
double epsilon_bound(int L, int k);

/// Lower bound on the ratio of any algorithm with phase factor c:
/// L(c) = inf_{a in (0,1)} max{ a/(1-a), (c+2)/(c a) + 1, c (a+1) + 1 },
/// evaluated numerically to about 1e-6 in a.
double L_of_c(double c);

/// Numeric minimum of L(c) over c > 0; returns {argmin c, min value}.
std::pair<double, double> min_L_of_c();

/// One phase on the two-node line from coinciding positions: the adversary
/// fixes OPT only after the policy's migration decision. Ends at level 0.
PlayOutcome linear_play(const PhaseMoveRule& rule, const GameParams& params);

/// One phase on the hub/Q/S geometry from level `level` < L. The policy's
/// move decides the case: stay (loop), move into Q (descend a level) or move
/// into S (jump to the far state). `rng`, when given, randomizes the
/// adversary's choice among equally-cheap OPT homes.
PlayOutcome bipartite_play(const PhaseMoveRule& rule, const GameParams& params, int level,
                           std::mt19937_64* rng = nullptr);

/// Repeats all-requests-at-OPT phases on a two-node graph at distance f until
/// the policy migrates; OPT pays nothing. Throws NonCompetitivePolicyError
/// after max_phases refusals.
PlayOutcome finishing_play(const PhaseMoveRule& rule, const GameParams& params, double f,
                           int max_phases = 64);

struct EpochLedger {
  std::vector<PlayOutcome> plays;
  int epochs = 0;
  double total_alg = 0.0;
  double total_opt = 0.0;
  double realized_ratio = 0.0;
  double epsilon = 0.0;
  double min_bound_slack = 0.0;     ///< min over plays of gain - lemma_bound
  double transition_opt_cost = 0.0; ///< OPT cost outside loop plays
  bool below_cT = false;            ///< flagged when c_eff < c_T
  bool forced_finish = false;       ///< a loop cap cut an epoch short
};

/// Drives the state machine S -> linear -> bipartite chain -> finishing -> S
/// for `num_epochs` epochs. `loop_cap` bounds consecutive loops at one level
/// before the adversary gives up on the level and finishes the epoch.
EpochLedger run_epochs(const PhaseMoveRule& rule, const GameParams& params, int num_epochs,
                       std::uint64_t seed, int loop_cap = 64);

struct StateGraphReport {
  double case1_telescope = 0.0;       ///< chain sum without the finishing gain
  double case1_with_finishing = 0.0;  ///< full closed path through level L
  double case2_min = 0.0;             ///< min over early exits to the far state
  double case2_closed_form = 0.0;     ///< (1+a) + 3a(c+1) - 1/(1-2a)
  double min_closed_path_gain = 0.0;  ///< min over both families, per unit D
};

/// Evaluates the closed-path gain families of the state graph analytically.
StateGraphReport verify_state_graph(int L, double c);

void write_epochs_json(const EpochLedger& ledger, const GameParams& params, std::ostream& out);
void write_epochs_csv(const EpochLedger& ledger, std::ostream& out);

}  // namespace migrationlab
