#include "migrationlab/lp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace migrationlab {

namespace {

std::string fmt(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

}  // namespace

int LpModel::var_index(const std::string& var_name) const {
  for (size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].name == var_name) return static_cast<int>(i);
  }
  throw std::invalid_argument("unknown LP variable: " + var_name);
}

int LpModel::pair_var(const std::string& a, const std::string& b) const {
  for (size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].name == "d_" + a + "_" + b || vars[i].name == "d_" + b + "_" + a) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

const char* lp_status_name(LpSolution::Status status) {
  switch (status) {
    case LpSolution::Status::kOptimal: return "optimal";
    case LpSolution::Status::kUnbounded: return "unbounded";
    case LpSolution::Status::kInfeasible: return "infeasible";
    case LpSolution::Status::kFailed: return "failed";
  }
  return "?";
}

namespace {

/// Assembles models over a set of labeled elements (points and request
/// multisets) with one average-distance variable per defined pair.
class ModelBuilder {
 public:
  explicit ModelBuilder(std::string name) { model_.name = std::move(name); }

  void add_point(const std::string& label) { add_element(label, false); }
  void add_multiset(const std::string& label) { add_element(label, true); }

  void make_pair_vars(bool include_multiset_pairs) {
    const int n = static_cast<int>(model_.elements.size());
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (!include_multiset_pairs && is_multiset_[i] && is_multiset_[j]) continue;
        pair_index_[{i, j}] = static_cast<int>(model_.vars.size());
        model_.vars.push_back(
            {"d_" + model_.elements[i] + "_" + model_.elements[j], true});
      }
    }
  }

  int cost_var(const std::string& name, bool nonneg) {
    model_.vars.push_back({name, nonneg});
    return static_cast<int>(model_.vars.size()) - 1;
  }

  int element(const std::string& label) const {
    for (size_t i = 0; i < model_.elements.size(); ++i) {
      if (model_.elements[i] == label) return static_cast<int>(i);
    }
    throw std::logic_error("unknown element " + label);
  }

  bool has_pair(const std::string& a, const std::string& b) const {
    return pair_index_.count(key(element(a), element(b))) != 0;
  }

  int pair(const std::string& a, const std::string& b) const {
    auto it = pair_index_.find(key(element(a), element(b)));
    if (it == pair_index_.end()) throw std::logic_error("no pair variable for " + a + "," + b);
    return it->second;
  }

  void constrain(std::string name, std::vector<LinearTerm> terms, Relation rel, double rhs) {
    model_.constraints.push_back({std::move(name), std::move(terms), rel, rhs});
  }

  /// [a,c] <= [a,b] + [b,c] for every defined triple, middles in element
  /// order. Pairs with no variable are skipped.
  void add_triangles() {
    const int n = static_cast<int>(model_.elements.size());
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        auto endpoint = pair_index_.find(key(i, j));
        if (endpoint == pair_index_.end()) continue;
        for (int m = 0; m < n; ++m) {
          if (m == i || m == j) continue;
          auto left = pair_index_.find(key(i, m));
          auto right = pair_index_.find(key(m, j));
          if (left == pair_index_.end() || right == pair_index_.end()) continue;
          constrain("tri_" + model_.elements[i] + "_" + model_.elements[m] + "_" +
                        model_.elements[j],
                    {{endpoint->second, 1.0}, {left->second, -1.0}, {right->second, -1.0}},
                    Relation::kLessEq, 0.0);
        }
      }
    }
  }

  LpModel take(int objective_var, std::map<std::string, double> params) {
    model_.objective_var = objective_var;
    model_.params = std::move(params);
    return std::move(model_);
  }

 private:
  void add_element(const std::string& label, bool is_multiset) {
    model_.elements.push_back(label);
    is_multiset_.push_back(is_multiset);
  }

  static std::pair<int, int> key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

  LpModel model_;
  std::vector<bool> is_multiset_;
  std::map<std::pair<int, int>, int> pair_index_;
};

}  // namespace

LpModel build_mtlm_lp(double delta, double beta, double phi) {
  if (delta <= 0 || beta <= 0 || phi <= 0) {
    throw std::invalid_argument("LP parameters must be positive");
  }
  ModelBuilder b("mtlm");
  for (const char* p : {"A0", "A1", "O0", "O1"}) b.add_point(p);
  b.add_multiset("R");
  b.make_pair_vars(true);

  const int c_alg = b.cost_var("C_ALG", false);
  const int c_opt = b.cost_var("C_OPT", true);
  const int c_req = b.cost_var("C_OPT_req", true);
  const int c_move = b.cost_var("C_OPT_move", true);

  b.constrain("alg_cost",
              {{c_alg, 1.0},
               {b.pair("A0", "R"), -delta},
               {b.pair("A0", "A1"), -1.0},
               {b.pair("A1", "O1"), -phi},
               {b.pair("A0", "O0"), phi}},
              Relation::kEqual, 0.0);
  b.constrain("opt_norm", {{c_opt, 1.0}}, Relation::kEqual, 1.0);
  b.constrain("opt_split", {{c_opt, 1.0}, {c_req, -1.0}, {c_move, -1.0}}, Relation::kEqual, 0.0);
  b.constrain("opt_move_lb", {{c_move, 1.0}, {b.pair("O0", "O1"), -1.0}}, Relation::kGreaterEq,
              0.0);
  b.constrain("opt_request_lb",
              {{c_req, 2.0},
               {c_move, delta},
               {b.pair("O0", "R"), -delta},
               {b.pair("O1", "R"), -delta}},
              Relation::kGreaterEq, 0.0);

  // f(A1) <= f(v) for every v in V, with f(x) = [A0,x] + beta*[x,R].
  auto f_terms = [&](const std::string& x, double sign) {
    std::vector<LinearTerm> terms;
    if (x != "A0") terms.push_back({b.pair("A0", x), sign});
    terms.push_back({b.pair(x, "R"), sign * beta});
    return terms;
  };
  for (const char* v : {"A0", "A1", "O0", "O1"}) {
    std::vector<LinearTerm> terms = f_terms("A1", 1.0);
    for (LinearTerm t : f_terms(v, -1.0)) terms.push_back(t);
    b.constrain(std::string("min_f_") + v, std::move(terms), Relation::kLessEq, 0.0);
  }
  b.add_triangles();
  return b.take(c_alg, {{"delta", delta}, {"beta", beta}, {"phi", phi}});
}

LpModel build_dlm_lp(const DlmLpParams& p, bool include_short, bool include_multiset_pairs) {
  ModelBuilder b(include_short ? "dlm" : "dlm-no-short");
  b.add_point("A0");
  if (include_short) b.add_point("A2");
  b.add_point("A3");
  for (const char* v : {"OL0", "OL1", "OL2", "OL3"}) b.add_point(v);
  std::vector<std::string> quantified = {"A0", "A3", "OL0", "OL1", "OL2", "OL3"};
  if (include_short) {
    for (const char* v : {"OS0", "OS1", "OS2"}) {
      b.add_point(v);
      quantified.push_back(v);
    }
  }
  for (const char* r : {"R1", "R2", "R3"}) b.add_multiset(r);
  b.make_pair_vars(include_multiset_pairs);

  const int c_algl = b.cost_var("C_ALGL", false);
  const int c_optl = b.cost_var("C_OPTL", true);
  int c_reql[3], c_movel[3];
  for (int i = 0; i < 3; ++i) c_reql[i] = b.cost_var("C_OPTL_req" + std::to_string(i + 1), true);
  for (int i = 0; i < 3; ++i) c_movel[i] = b.cost_var("C_OPTL_move" + std::to_string(i + 1), true);

  const std::string parts[3] = {"R1", "R2", "R3"};
  const std::string opt_long[4] = {"OL0", "OL1", "OL2", "OL3"};

  b.constrain("algL_cost",
              {{c_algl, 1.0},
               {b.pair("A0", "A3"), -1.0},
               {b.pair("A0", "R1"), -p.delta[0]},
               {b.pair("A0", "R2"), -p.delta[1]},
               {b.pair("A0", "R3"), -p.delta[2]},
               {b.pair("A3", "OL3"), -p.phi},
               {b.pair("A0", "OL0"), p.phi}},
              Relation::kEqual, 0.0);
  b.constrain("optL_norm", {{c_optl, 1.0}}, Relation::kEqual, 1.0);
  {
    std::vector<LinearTerm> split = {{c_optl, 1.0}};
    for (int i = 0; i < 3; ++i) split.push_back({c_reql[i], -1.0});
    for (int i = 0; i < 3; ++i) split.push_back({c_movel[i], -1.0});
    b.constrain("optL_split", std::move(split), Relation::kEqual, 0.0);
  }
  for (int i = 0; i < 3; ++i) {
    const std::string tag = std::to_string(i + 1);
    b.constrain("optL_move_lb_" + tag,
                {{c_movel[i], 1.0}, {b.pair(opt_long[i], opt_long[i + 1]), -1.0}},
                Relation::kGreaterEq, 0.0);
    const double move_coef = p.per_part_delta ? p.delta[i] : p.global_delta;
    b.constrain("optL_request_lb_" + tag,
                {{c_reql[i], 2.0},
                 {c_movel[i], move_coef},
                 {b.pair(opt_long[i], parts[i]), -p.delta[i]},
                 {b.pair(opt_long[i + 1], parts[i]), -p.delta[i]}},
                Relation::kGreaterEq, 0.0);
  }

  // h(A3) <= h(v) with h(x) = [A0,x] + sum_i beta_i [x,R_i].
  auto h_terms = [&](const std::string& x, double sign) {
    std::vector<LinearTerm> terms;
    if (x != "A0") terms.push_back({b.pair("A0", x), sign});
    for (int i = 0; i < 3; ++i) terms.push_back({b.pair(x, parts[i]), sign * p.beta[i]});
    return terms;
  };
  for (const std::string& v : quantified) {
    std::vector<LinearTerm> terms = h_terms("A3", 1.0);
    for (LinearTerm t : h_terms(v, -1.0)) terms.push_back(t);
    b.constrain("min_h_" + v, std::move(terms), Relation::kLessEq, 0.0);
  }

  std::map<std::string, double> params = {{"delta1", p.delta[0]}, {"delta2", p.delta[1]},
                                          {"delta3", p.delta[2]}, {"beta1", p.beta[0]},
                                          {"beta2", p.beta[1]},   {"beta3", p.beta[2]},
                                          {"beta_prime1", p.beta_prime[0]},
                                          {"beta_prime2", p.beta_prime[1]},
                                          {"phi", p.phi},
                                          {"per_part_delta", p.per_part_delta ? 1.0 : 0.0},
                                          {"global_delta", p.global_delta},
                                          {"include_short", include_short ? 1.0 : 0.0},
                                          {"multiset_pairs", include_multiset_pairs ? 1.0 : 0.0}};

  if (!include_short) {
    b.add_triangles();
    return b.take(c_algl, std::move(params));
  }

  const int c_algs = b.cost_var("C_ALGS", false);
  const int c_opts = b.cost_var("C_OPTS", true);
  int c_reqs[2], c_moves[2];
  for (int i = 0; i < 2; ++i) c_reqs[i] = b.cost_var("C_OPTS_req" + std::to_string(i + 1), true);
  for (int i = 0; i < 2; ++i) c_moves[i] = b.cost_var("C_OPTS_move" + std::to_string(i + 1), true);
  const std::string opt_short[3] = {"OS0", "OS1", "OS2"};

  b.constrain("algS_cost",
              {{c_algs, 1.0},
               {b.pair("A0", "A2"), -1.0},
               {b.pair("A0", "R1"), -p.delta[0]},
               {b.pair("A0", "R2"), -p.delta[1]},
               {b.pair("A2", "OS2"), -p.phi},
               {b.pair("A0", "OS0"), p.phi}},
              Relation::kEqual, 0.0);
  {
    std::vector<LinearTerm> split = {{c_opts, 1.0}};
    for (int i = 0; i < 2; ++i) split.push_back({c_reqs[i], -1.0});
    for (int i = 0; i < 2; ++i) split.push_back({c_moves[i], -1.0});
    b.constrain("optS_split", std::move(split), Relation::kEqual, 0.0);
  }
  for (int i = 0; i < 2; ++i) {
    const std::string tag = std::to_string(i + 1);
    b.constrain("optS_move_lb_" + tag,
                {{c_moves[i], 1.0}, {b.pair(opt_short[i], opt_short[i + 1]), -1.0}},
                Relation::kGreaterEq, 0.0);
    const double move_coef = p.per_part_delta ? p.delta[i] : p.global_delta;
    b.constrain("optS_request_lb_" + tag,
                {{c_reqs[i], 2.0},
                 {c_moves[i], move_coef},
                 {b.pair(opt_short[i], parts[i]), -p.delta[i]},
                 {b.pair(opt_short[i + 1], parts[i]), -p.delta[i]}},
                Relation::kGreaterEq, 0.0);
  }
  auto g_terms = [&](const std::string& x, double sign) {
    std::vector<LinearTerm> terms;
    if (x != "A0") terms.push_back({b.pair("A0", x), sign});
    for (int i = 0; i < 2; ++i) terms.push_back({b.pair(x, parts[i]), sign * p.beta_prime[i]});
    return terms;
  };
  for (const std::string& v : quantified) {
    std::vector<LinearTerm> terms = g_terms("A2", 1.0);
    for (LinearTerm t : g_terms(v, -1.0)) terms.push_back(t);
    b.constrain("min_g_" + v, std::move(terms), Relation::kLessEq, 0.0);
  }
  b.constrain("algS_ratio", {{c_algs, 1.0}, {c_opts, -4.0}}, Relation::kGreaterEq, 0.0);

  b.add_triangles();
  return b.take(c_algl, std::move(params));
}

double max_violation(const LpModel& model, const std::vector<double>& assignment) {
  double worst = 0.0;
  for (const LpConstraint& c : model.constraints) {
    double lhs = 0.0;
    for (const LinearTerm& t : c.terms) lhs += t.coef * assignment[static_cast<size_t>(t.var)];
    double violation = 0.0;
    switch (c.rel) {
      case Relation::kLessEq: violation = lhs - c.rhs; break;
      case Relation::kGreaterEq: violation = c.rhs - lhs; break;
      case Relation::kEqual: violation = std::abs(lhs - c.rhs); break;
    }
    worst = std::max(worst, violation);
  }
  for (size_t i = 0; i < model.vars.size(); ++i) {
    if (model.vars[i].nonneg) worst = std::max(worst, -assignment[i]);
  }
  return worst;
}

LpSolution solve_lp(const LpModel& model, double feas_tol, long max_iterations) {
  constexpr double kPivotEps = 1e-7;
  constexpr double kCostEps = 1e-9;
  LpSolution solution;

  // Column layout: structural columns (free variables split into +/-),
  // then one slack per inequality row, then artificials.
  const int nvars = static_cast<int>(model.vars.size());
  std::vector<int> pos_col(static_cast<size_t>(nvars));
  std::vector<int> neg_col(static_cast<size_t>(nvars), -1);
  int ncols = 0;
  for (int v = 0; v < nvars; ++v) {
    pos_col[static_cast<size_t>(v)] = ncols++;
    if (!model.vars[static_cast<size_t>(v)].nonneg) neg_col[static_cast<size_t>(v)] = ncols++;
  }
  const int m = static_cast<int>(model.constraints.size());
  std::vector<int> slack_col(static_cast<size_t>(m), -1);
  for (int i = 0; i < m; ++i) {
    if (model.constraints[static_cast<size_t>(i)].rel != Relation::kEqual) {
      slack_col[static_cast<size_t>(i)] = ncols++;
    }
  }
  const int art_base = ncols;

  // Row assembly in "a'x (+slack) = b, b >= 0" form.
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(m, ncols + m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  std::vector<int> basis(static_cast<size_t>(m), -1);
  int nart = 0;
  for (int i = 0; i < m; ++i) {
    const LpConstraint& c = model.constraints[static_cast<size_t>(i)];
    double sign = 1.0;
    if (c.rel == Relation::kGreaterEq) sign = -1.0;  // to <=
    for (const LinearTerm& t : c.terms) {
      rows(i, pos_col[static_cast<size_t>(t.var)]) += sign * t.coef;
      if (neg_col[static_cast<size_t>(t.var)] >= 0) {
        rows(i, neg_col[static_cast<size_t>(t.var)]) -= sign * t.coef;
      }
    }
    double b = sign * c.rhs;
    if (slack_col[static_cast<size_t>(i)] >= 0) rows(i, slack_col[static_cast<size_t>(i)]) = 1.0;
    if (b < 0) {
      rows.row(i) = -rows.row(i);
      b = -b;
    }
    rhs(i) = b;
    if (slack_col[static_cast<size_t>(i)] >= 0 &&
        rows(i, slack_col[static_cast<size_t>(i)]) > 0.5) {
      basis[static_cast<size_t>(i)] = slack_col[static_cast<size_t>(i)];
    } else {
      const int art = art_base + nart++;
      rows(i, art) = 1.0;
      basis[static_cast<size_t>(i)] = art;
    }
  }
  const int total_cols = art_base + nart;

  // Tableau: m constraint rows, then phase-2 and phase-1 cost rows.
  Eigen::MatrixXd T(m + 2, total_cols + 1);
  T.setZero();
  T.block(0, 0, m, total_cols) = rows.leftCols(total_cols);
  T.col(total_cols).head(m) = rhs;
  const int obj_row = m;
  const int art_row = m + 1;
  // Phase 2 minimizes -objective_var.
  T(obj_row, pos_col[static_cast<size_t>(model.objective_var)]) = -1.0;
  if (neg_col[static_cast<size_t>(model.objective_var)] >= 0) {
    T(obj_row, neg_col[static_cast<size_t>(model.objective_var)]) = 1.0;
  }
  // Phase 1 minimizes the artificial sum; reduce by the artificial basic rows.
  for (int i = 0; i < m; ++i) {
    if (basis[static_cast<size_t>(i)] >= art_base) T.row(art_row) -= T.row(i);
  }
  for (int c = art_base; c < total_cols; ++c) T(art_row, c) = 0.0;

  long iterations = 0;
  bool bland = false;
  long stall = 0;
  double best_cost = std::numeric_limits<double>::infinity();

  auto pivot = [&](int row, int col) {
    T.row(row) /= T(row, col);
    for (int i = 0; i < m + 2; ++i) {
      if (i == row) continue;
      const double factor = T(i, col);
      if (factor != 0.0) T.row(i) -= factor * T.row(row);
    }
    basis[static_cast<size_t>(row)] = col;
  };

  auto run_phase = [&](int price_row, int allowed_cols) -> LpSolution::Status {
    best_cost = std::numeric_limits<double>::infinity();
    stall = 0;
    while (true) {
      if (++iterations > max_iterations) return LpSolution::Status::kFailed;
      int entering = -1;
      if (bland) {
        for (int c = 0; c < allowed_cols; ++c) {
          if (T(price_row, c) < -kCostEps) {
            entering = c;
            break;
          }
        }
      } else {
        double most_negative = -kCostEps;
        for (int c = 0; c < allowed_cols; ++c) {
          if (T(price_row, c) < most_negative) {
            most_negative = T(price_row, c);
            entering = c;
          }
        }
      }
      if (entering < 0) return LpSolution::Status::kOptimal;
      int leaving = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m; ++i) {
        if (T(i, entering) <= kPivotEps) continue;
        const double ratio = T(i, total_cols) / T(i, entering);
        if (leaving < 0 || ratio < best_ratio - 1e-10) {
          leaving = i;
          best_ratio = ratio;
        } else if (ratio < best_ratio + 1e-10) {
          // Among (near-)tied ratios prefer a large pivot element for
          // stability; under Bland's rule the lowest basis index decides.
          const bool better = bland
                                  ? basis[static_cast<size_t>(i)] <
                                        basis[static_cast<size_t>(leaving)]
                                  : T(i, entering) > T(leaving, entering);
          if (better) {
            leaving = i;
            best_ratio = std::min(best_ratio, ratio);
          }
        }
      }
      if (leaving < 0) return LpSolution::Status::kUnbounded;
      pivot(leaving, entering);
      const double cost = T(price_row, total_cols);
      if (cost < best_cost - 1e-12) {
        best_cost = cost;
        stall = 0;
      } else if (!bland && ++stall > 1000) {
        bland = true;  // anti-cycling fallback
      }
    }
  };

  if (nart > 0) {
    LpSolution::Status status = run_phase(art_row, art_base);
    if (status == LpSolution::Status::kFailed) {
      solution.status = status;
      solution.iterations = iterations;
      solution.message = "iteration limit in phase 1";
      return solution;
    }
    // -T(art_row, last) is the artificial sum.
    if (-T(art_row, total_cols) > 1e-7) {
      solution.status = LpSolution::Status::kInfeasible;
      solution.iterations = iterations;
      return solution;
    }
    // Drive leftover artificials out of the basis; fully dependent rows are
    // cleared so they can never pivot again.
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<size_t>(i)] < art_base) continue;
      int col = -1;
      for (int c = 0; c < art_base; ++c) {
        if (std::abs(T(i, c)) > kPivotEps) {
          col = c;
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
      } else {
        T.row(i).setZero();
      }
    }
  }

  bland = false;
  LpSolution::Status status = run_phase(obj_row, art_base);
  solution.iterations = iterations;
  if (status == LpSolution::Status::kUnbounded) {
    solution.status = status;
    solution.message = "objective can be increased without bound";
    return solution;
  }
  if (status == LpSolution::Status::kFailed) {
    solution.status = status;
    solution.message = "iteration limit in phase 2";
    return solution;
  }

  std::vector<double> column_value(static_cast<size_t>(total_cols), 0.0);
  for (int i = 0; i < m; ++i) {
    column_value[static_cast<size_t>(basis[static_cast<size_t>(i)])] = T(i, total_cols);
  }
  solution.assignment.assign(static_cast<size_t>(nvars), 0.0);
  for (int v = 0; v < nvars; ++v) {
    double x = column_value[static_cast<size_t>(pos_col[static_cast<size_t>(v)])];
    if (neg_col[static_cast<size_t>(v)] >= 0) {
      x -= column_value[static_cast<size_t>(neg_col[static_cast<size_t>(v)])];
    }
    solution.assignment[static_cast<size_t>(v)] = x;
  }
  solution.objective = solution.assignment[static_cast<size_t>(model.objective_var)];
  const double violation = max_violation(model, solution.assignment);
  if (violation > feas_tol) {
    solution.status = LpSolution::Status::kFailed;
    solution.message = "solution re-check failed, violation " + fmt(violation);
    return solution;
  }
  solution.status = LpSolution::Status::kOptimal;
  return solution;
}

std::string export_lp(const LpModel& model) {
  std::ostringstream os;
  os << "\\ model: " << model.name << "\n";
  for (const auto& [key, value] : model.params) {
    os << "\\ param " << key << " " << fmt(value) << "\n";
  }
  if (!model.elements.empty()) {
    os << "\\ elements:";
    for (const std::string& e : model.elements) os << " " << e;
    os << "\n";
  }
  os << "\\ vars:";
  for (const LpVariable& v : model.vars) os << " " << v.name;
  os << "\n";
  os << "Maximize\n obj: " << model.vars[static_cast<size_t>(model.objective_var)].name << "\n";
  os << "Subject To\n";
  for (const LpConstraint& c : model.constraints) {
    os << " " << c.name << ":";
    for (size_t i = 0; i < c.terms.size(); ++i) {
      const LinearTerm& t = c.terms[i];
      const double mag = std::abs(t.coef);
      os << (t.coef < 0 ? " -" : (i == 0 ? "" : " +")) << " ";
      if (mag != 1.0) os << fmt(mag) << " ";
      os << model.vars[static_cast<size_t>(t.var)].name;
    }
    switch (c.rel) {
      case Relation::kLessEq: os << " <= "; break;
      case Relation::kGreaterEq: os << " >= "; break;
      case Relation::kEqual: os << " = "; break;
    }
    os << fmt(c.rhs) << "\n";
  }
  os << "Bounds\n";
  for (const LpVariable& v : model.vars) {
    if (!v.nonneg) os << " " << v.name << " free\n";
  }
  os << "End\n";
  return os.str();
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream is(line);
  std::string token;
  while (is >> token) tokens.push_back(token);
  return tokens;
}

bool parse_number(const std::string& token, double* out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

LpModel parse_lp(const std::string& text) {
  LpModel model;
  std::map<std::string, int> var_index;
  auto intern = [&](const std::string& name) {
    auto it = var_index.find(name);
    if (it != var_index.end()) return it->second;
    throw std::invalid_argument("LP text references undeclared variable " + name);
  };

  std::istringstream is(text);
  std::string line;
  enum class Section { kNone, kMaximize, kConstraints, kBounds, kDone };
  Section section = Section::kNone;
  std::string objective_name;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '\\') {
      auto tokens = tokenize(line.substr(1));
      if (tokens.size() >= 2 && tokens[0] == "model:") {
        model.name = tokens[1];
      } else if (tokens.size() == 3 && tokens[0] == "param") {
        double value = 0.0;
        if (!parse_number(tokens[2], &value)) {
          throw std::invalid_argument("bad param line: " + line);
        }
        model.params[tokens[1]] = value;
      } else if (!tokens.empty() && tokens[0] == "elements:") {
        model.elements.assign(tokens.begin() + 1, tokens.end());
      } else if (!tokens.empty() && tokens[0] == "vars:") {
        for (size_t i = 1; i < tokens.size(); ++i) {
          var_index[tokens[i]] = static_cast<int>(model.vars.size());
          model.vars.push_back({tokens[i], true});
        }
      }
      continue;
    }
    if (line == "Maximize") {
      section = Section::kMaximize;
      continue;
    }
    if (line == "Subject To") {
      section = Section::kConstraints;
      continue;
    }
    if (line == "Bounds") {
      section = Section::kBounds;
      continue;
    }
    if (line == "End") {
      section = Section::kDone;
      break;
    }
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    switch (section) {
      case Section::kMaximize: {
        if (tokens.size() != 2 || tokens[0] != "obj:") {
          throw std::invalid_argument("unsupported objective line: " + line);
        }
        objective_name = tokens[1];
        break;
      }
      case Section::kConstraints: {
        if (tokens[0].back() != ':') throw std::invalid_argument("missing constraint name: " + line);
        LpConstraint c;
        c.name = tokens[0].substr(0, tokens[0].size() - 1);
        size_t i = 1;
        double sign = 1.0;
        bool have_sign = false;
        while (i < tokens.size()) {
          const std::string& tok = tokens[i];
          if (tok == "<=" || tok == ">=" || tok == "=") {
            c.rel = tok == "<=" ? Relation::kLessEq
                                : (tok == ">=" ? Relation::kGreaterEq : Relation::kEqual);
            ++i;
            if (i != tokens.size() - 1 || !parse_number(tokens[i], &c.rhs)) {
              throw std::invalid_argument("bad constraint tail: " + line);
            }
            i = tokens.size();
            break;
          }
          if (tok == "+") {
            sign = 1.0;
            have_sign = true;
            ++i;
            continue;
          }
          if (tok == "-") {
            sign = -1.0;
            have_sign = true;
            ++i;
            continue;
          }
          double coef = 1.0;
          if (parse_number(tok, &coef)) {
            ++i;
            if (i >= tokens.size()) throw std::invalid_argument("dangling coefficient: " + line);
            c.terms.push_back({intern(tokens[i]), sign * coef});
          } else {
            c.terms.push_back({intern(tok), sign});
          }
          sign = 1.0;
          have_sign = false;
          ++i;
        }
        (void)have_sign;
        model.constraints.push_back(std::move(c));
        break;
      }
      case Section::kBounds: {
        if (tokens.size() == 2 && tokens[1] == "free") {
          model.vars[static_cast<size_t>(intern(tokens[0]))].nonneg = false;
        } else {
          throw std::invalid_argument("unsupported bounds line: " + line);
        }
        break;
      }
      default:
        throw std::invalid_argument("unexpected line outside section: " + line);
    }
  }
  if (objective_name.empty()) throw std::invalid_argument("LP text has no objective");
  model.objective_var = intern(objective_name);
  return model;
}

WitnessReport extract_witness(const LpModel& model, const LpSolution& solution, double tol) {
  if (solution.status != LpSolution::Status::kOptimal) {
    throw std::invalid_argument("witness extraction needs an optimal solution");
  }
  WitnessReport report;
  report.elements = model.elements;
  const int n = static_cast<int>(model.elements.size());
  report.distances = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  std::vector<bool> is_pair(model.vars.size(), false);
  for (int i = 0; i < n; ++i) {
    report.distances(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const int var = model.pair_var(model.elements[static_cast<size_t>(i)],
                                     model.elements[static_cast<size_t>(j)]);
      if (var < 0) continue;
      is_pair[static_cast<size_t>(var)] = true;
      report.distances(i, j) = report.distances(j, i) =
          solution.assignment[static_cast<size_t>(var)];
    }
  }
  for (size_t v = 0; v < model.vars.size(); ++v) {
    if (!is_pair[v]) report.costs[model.vars[v].name] = solution.assignment[v];
  }
  for (const LpConstraint& c : model.constraints) {
    double lhs = 0.0;
    for (const LinearTerm& t : c.terms) lhs += t.coef * solution.assignment[static_cast<size_t>(t.var)];
    if (std::abs(lhs - c.rhs) <= tol) report.tight_constraints.push_back(c.name);
  }
  return report;
}

void write_solution_json(const LpModel& model, const LpSolution& solution, std::ostream& out) {
  nlohmann::ordered_json j;
  j["model"] = model.name;
  j["params"] = model.params;
  j["status"] = lp_status_name(solution.status);
  j["iterations"] = solution.iterations;
  if (!solution.message.empty()) j["message"] = solution.message;
  if (solution.status == LpSolution::Status::kOptimal) {
    j["objective"] = solution.objective;
    auto& assignment = j["assignment"] = nlohmann::ordered_json::object();
    for (size_t v = 0; v < model.vars.size(); ++v) {
      assignment[model.vars[v].name] = solution.assignment[v];
    }
    auto witness = extract_witness(model, solution);
    j["tight_constraints"] = witness.tight_constraints;
  }
  out << j.dump(2) << "\n";
}

}  // namespace migrationlab
