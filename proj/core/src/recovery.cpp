#include "sramdp/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "sramdp/errors.hpp"
#include "sramdp/mechanism.hpp"

namespace sramdp {

namespace {

constexpr std::size_t kMaxRecoveryCandidates = 4096;

void check_recovery_args(std::size_t observations, const CandidateSet& omega) {
  if (observations == 0) {
    throw ConfigError("recovery needs at least one observation");
  }
  if (omega.size() > kMaxRecoveryCandidates) {
    throw ConfigError("recovery supports up to 4096 candidates, got " +
                      std::to_string(omega.size()));
  }
}

// Likelihood rows L[r][j] = P(observation r | candidate j) plus a weight
// per row (identical observations under one shared profile are folded
// into a single weighted row).
struct LikelihoodTable {
  std::vector<std::vector<double>> rows;
  std::vector<double> weights;
  double total_weight = 0.0;
};

LikelihoodTable shared_profile_table(std::span<const Word> observations,
                                     const FailureProfile& f,
                                     const CandidateSet& omega) {
  std::map<std::uint32_t, double> counts;
  for (const Word& o : observations) {
    if (o.width() != f.width()) {
      throw ConfigError("observation width " + std::to_string(o.width()) +
                        " does not match profile width " +
                        std::to_string(f.width()));
    }
    counts[o.decode()] += 1.0;
  }
  LikelihoodTable table;
  table.rows.reserve(counts.size());
  table.weights.reserve(counts.size());
  for (const auto& [value, count] : counts) {
    const Word o = Word::encode(value, f.width());
    std::vector<double> row(omega.size(), 0.0);
    for (std::size_t j = 0; j < omega.size(); ++j) {
      row[j] = channel_prob(omega.word(j), o, f);
    }
    table.rows.push_back(std::move(row));
    table.weights.push_back(count);
    table.total_weight += count;
  }
  return table;
}

LikelihoodTable per_record_table(std::span<const Word> observations,
                                 std::span<const FailureProfile> profiles,
                                 const CandidateSet& omega) {
  if (profiles.size() != observations.size()) {
    throw ConfigError("got " + std::to_string(profiles.size()) +
                      " profiles for " + std::to_string(observations.size()) +
                      " observations");
  }
  LikelihoodTable table;
  table.rows.reserve(observations.size());
  table.weights.assign(observations.size(), 1.0);
  table.total_weight = static_cast<double>(observations.size());
  for (std::size_t r = 0; r < observations.size(); ++r) {
    const Word& o = observations[r];
    const FailureProfile& f = profiles[r];
    if (o.width() != f.width() || f.width() != omega.width()) {
      throw ConfigError("observation, profile and candidate widths must "
                        "all match");
    }
    std::vector<double> row(omega.size(), 0.0);
    for (std::size_t j = 0; j < omega.size(); ++j) {
      row[j] = channel_prob(omega.word(j), o, f);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

EmResult run_em(const LikelihoodTable& table, const CandidateSet& omega,
                const EmConfig& config) {
  if (!(config.delta > 0.0)) {
    throw ConfigError("EM stopping threshold must be positive");
  }
  if (config.max_iterations < 1) {
    throw ConfigError("EM needs at least one iteration");
  }
  const std::size_t n = omega.size();
  std::vector<double> prior(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n, 0.0);

  int iterations = 0;
  bool converged = false;
  double change = 0.0;
  while (iterations < config.max_iterations) {
    ++iterations;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const std::vector<double>& row = table.rows[r];
      double denom = 0.0;
      for (std::size_t j = 0; j < n; ++j) denom += prior[j] * row[j];
      if (!(denom > 0.0)) {
        throw NumericError("an observation has zero likelihood under every "
                           "candidate; the candidate set or profile does "
                           "not explain the data");
      }
      const double scale = table.weights[r] / denom;
      for (std::size_t j = 0; j < n; ++j) {
        next[j] += scale * prior[j] * row[j];
      }
    }
    change = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] /= table.total_weight;
      change = std::max(change, std::abs(next[j] - prior[j]));
    }
    prior.swap(next);
    if (change <= config.delta) {
      converged = true;
      break;
    }
  }

  // Guard against drift from repeated normalization.
  double total = std::accumulate(prior.begin(), prior.end(), 0.0);
  for (double& p : prior) p /= total;
  return EmResult{Distribution(std::move(prior)), iterations, converged,
                  change};
}

}  // namespace

EmResult em_recover(std::span<const Word> observations,
                    const FailureProfile& f, const CandidateSet& omega,
                    const EmConfig& config) {
  check_recovery_args(observations.size(), omega);
  if (f.width() != omega.width()) {
    throw ConfigError("profile width " + std::to_string(f.width()) +
                      " does not match candidate width " +
                      std::to_string(omega.width()));
  }
  return run_em(shared_profile_table(observations, f, omega), omega, config);
}

EmResult em_recover(std::span<const Word> observations,
                    std::span<const FailureProfile> per_record_f,
                    const CandidateSet& omega, const EmConfig& config) {
  check_recovery_args(observations.size(), omega);
  return run_em(per_record_table(observations, per_record_f, omega), omega,
                config);
}

std::vector<double> project_to_simplex(std::vector<double> v) {
  if (v.empty()) throw ConfigError("cannot project an empty vector");
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double running = 0.0;
  double tau = 0.0;
  std::size_t rho = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    running += u[k];
    const double candidate = (running - 1.0) / static_cast<double>(k + 1);
    if (u[k] - candidate > 0.0) {
      rho = k + 1;
      tau = candidate;
    }
  }
  (void)rho;
  for (double& x : v) x = std::max(0.0, x - tau);
  return v;
}

namespace {

// The quadratic pieces of the reconstruction objective.
struct ClrProblem {
  std::vector<std::vector<double>> m;  // channel matrix, |omega| x |omega|
  std::vector<double> q;               // observed output frequencies
  // Moment constraints, scaled so every feature vector has unit max
  // magnitude: rows of v with targets t; raw_scale maps back to raw units.
  std::vector<std::vector<double>> v;
  std::vector<double> t;
  std::vector<double> raw_scale;
  double lambda = 0.0;

  std::size_t size() const { return q.size(); }

  // residual = P*M - Q
  void residual(const std::vector<double>& p, std::vector<double>& out) const {
    const std::size_t n = size();
    for (std::size_t o = 0; o < n; ++o) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += p[i] * m[i][o];
      out[o] = acc - q[o];
    }
  }

  double objective(const std::vector<double>& p,
                   std::vector<double>& scratch) const {
    residual(p, scratch);
    double g = 0.0;
    for (double r : scratch) g += r * r;
    g *= 0.5;
    for (std::size_t c = 0; c < v.size(); ++c) {
      double dot = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) dot += v[c][i] * p[i];
      const double gap = dot - t[c];
      g += lambda * gap * gap;
    }
    return g;
  }

  void gradient(const std::vector<double>& p, std::vector<double>& grad,
                std::vector<double>& scratch) const {
    residual(p, scratch);
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t o = 0; o < n; ++o) acc += scratch[o] * m[i][o];
      grad[i] = acc;
    }
    for (std::size_t c = 0; c < v.size(); ++c) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += v[c][i] * p[i];
      const double coef = 2.0 * lambda * (dot - t[c]);
      for (std::size_t i = 0; i < n; ++i) grad[i] += coef * v[c][i];
    }
  }

  // Upper bound on the gradient's Lipschitz constant:
  // sigma_max(M)^2 <= ||M||_1 * ||M||_inf, plus the penalty curvature.
  double lipschitz() const {
    const std::size_t n = size();
    double max_row = 0.0;
    std::vector<double> col_sums(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t o = 0; o < n; ++o) {
        const double a = std::abs(m[i][o]);
        row += a;
        col_sums[o] += a;
      }
      max_row = std::max(max_row, row);
    }
    double max_col = 0.0;
    for (double c : col_sums) max_col = std::max(max_col, c);
    double lip = max_row * max_col;
    for (const std::vector<double>& vc : v) {
      double norm2 = 0.0;
      for (double x : vc) norm2 += x * x;
      lip += 2.0 * lambda * norm2;
    }
    return std::max(lip, 1e-12);
  }

  double max_raw_violation(const std::vector<double>& p) const {
    double worst = 0.0;
    for (std::size_t c = 0; c < v.size(); ++c) {
      double dot = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) dot += v[c][i] * p[i];
      worst = std::max(worst, std::abs(dot - t[c]) * raw_scale[c]);
    }
    return worst;
  }
};

// Accelerated projected gradient with adaptive restart.  Returns the
// iteration count; pg_norm_out carries the final gradient-mapping norm.
int solve_penalized(const ClrProblem& problem, std::vector<double>& p,
                    const ClrConfig& config, double* pg_norm_out) {
  const std::size_t n = problem.size();
  const double lip = problem.lipschitz();
  const double step = 1.0 / lip;

  std::vector<double> y = p;
  std::vector<double> prev = p;
  std::vector<double> grad(n), scratch(n), trial(n);
  double theta = 1.0;
  double best_obj = problem.objective(p, scratch);

  int it = 0;
  double pg_norm = 0.0;
  for (; it < config.max_iterations; ++it) {
    problem.gradient(y, grad, scratch);
    for (std::size_t i = 0; i < n; ++i) trial[i] = y[i] - step * grad[i];
    trial = project_to_simplex(std::move(trial));

    // Gradient-mapping norm at the extrapolation point.
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (y[i] - trial[i]) * lip;
      norm2 += d * d;
    }
    pg_norm = std::sqrt(norm2);

    prev.swap(p);
    p = trial;

    if (pg_norm < config.pg_tolerance) {
      ++it;
      break;
    }

    const double obj = problem.objective(p, scratch);
    if (obj > best_obj) {
      // Momentum overshot; restart from the last iterate.
      theta = 1.0;
      y = p;
    } else {
      best_obj = obj;
      const double theta_next =
          0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      const double beta = (theta - 1.0) / theta_next;
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = p[i] + beta * (p[i] - prev[i]);
      }
      theta = theta_next;
    }
  }
  *pg_norm_out = pg_norm;
  return it;
}

}  // namespace

ClrResult clr_recover(std::span<const Word> observations,
                      const FailureProfile& f, const CandidateSet& omega,
                      std::span<const MomentConstraint> moments,
                      const ClrConfig& config) {
  check_recovery_args(observations.size(), omega);
  if (f.width() != omega.width()) {
    throw ConfigError("profile width " + std::to_string(f.width()) +
                      " does not match candidate width " +
                      std::to_string(omega.width()));
  }

  ClrProblem problem;
  problem.m.assign(omega.size(), std::vector<double>(omega.size(), 0.0));
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const Word x = omega.word(i);
    for (std::size_t j = 0; j < omega.size(); ++j) {
      problem.m[i][j] = channel_prob(x, omega.word(j), f);
    }
  }

  problem.q.assign(omega.size(), 0.0);
  for (const Word& o : observations) {
    if (o.width() != omega.width()) {
      throw ConfigError("observation width " + std::to_string(o.width()) +
                        " does not match candidate width " +
                        std::to_string(omega.width()));
    }
    if (auto idx = omega.index_of(o.decode())) problem.q[*idx] += 1.0;
  }
  for (double& qv : problem.q) {
    qv /= static_cast<double>(observations.size());
  }

  for (const MomentConstraint& mc : moments) {
    if (mc.order < 1) {
      throw ConfigError("moment constraint orders start at 1, got " +
                        std::to_string(mc.order));
    }
    std::vector<double> feature(omega.size(), 0.0);
    double max_abs = 0.0;
    double feasible_lo = 0.0, feasible_hi = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
      feature[i] = std::pow(static_cast<double>(omega.value(i)),
                            static_cast<double>(mc.order));
      max_abs = std::max(max_abs, std::abs(feature[i]));
      if (i == 0) {
        feasible_lo = feasible_hi = feature[i];
      } else {
        feasible_lo = std::min(feasible_lo, feature[i]);
        feasible_hi = std::max(feasible_hi, feature[i]);
      }
    }
    // A moment is a convex combination of the feature values, so a
    // target outside their hull can never be met.
    if (mc.value < feasible_lo - 1e-12 || mc.value > feasible_hi + 1e-12) {
      throw NumericError("moment constraint of order " +
                         std::to_string(mc.order) + " with target " +
                         std::to_string(mc.value) +
                         " lies outside the attainable range [" +
                         std::to_string(feasible_lo) + ", " +
                         std::to_string(feasible_hi) + "]");
    }
    const double scale = max_abs > 0.0 ? max_abs : 1.0;
    for (double& x : feature) x /= scale;
    problem.v.push_back(std::move(feature));
    problem.t.push_back(mc.value / scale);
    problem.raw_scale.push_back(scale);
  }

  std::vector<double> p(omega.size(), 1.0 / static_cast<double>(omega.size()));
  ClrResult result{Distribution::uniform(omega.size()), 0, 0.0, 0.0};

  if (problem.v.empty()) {
    result.iterations = solve_penalized(problem, p, config, &result.pg_norm);
  } else {
    problem.lambda = config.penalty_initial;
    bool satisfied = false;
    for (int round = 0; round < config.penalty_rounds; ++round) {
      result.iterations +=
          solve_penalized(problem, p, config, &result.pg_norm);
      result.moment_violation = problem.max_raw_violation(p);
      if (result.moment_violation < config.moment_tolerance) {
        satisfied = true;
        break;
      }
      problem.lambda *= config.penalty_growth;
    }
    if (!satisfied) {
      throw NumericError("moment constraints could not be satisfied: "
                         "violation " +
                         std::to_string(result.moment_violation) +
                         " after escalating the penalty to " +
                         std::to_string(problem.lambda));
    }
  }

  // The projection returns points on the simplex up to rounding; snap to
  // an exact distribution.
  double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= total;
  result.estimate = Distribution(std::move(p));
  return result;
}

}  // namespace sramdp
