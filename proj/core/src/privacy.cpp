#include "sramdp/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sramdp/errors.hpp"
#include "sramdp/mechanism.hpp"

namespace sramdp {

double per_bit_epsilon(double f) {
  if (!(f > 0.0) || f > 1.0) {
    throw NumericError("per-bit privacy loss needs a failure rate in "
                       "(0, 1]; rate " + std::to_string(f) +
                       " gives an unbounded budget");
  }
  const double half = 0.5 * f;
  return std::log((1.0 - half) / half);
}

double epsilon_inf(const FailureProfile& f) {
  double total = 0.0;
  for (int i = 0; i < f.width(); ++i) {
    const double fi = f[static_cast<std::size_t>(i)];
    if (fi > 0.0) total += per_bit_epsilon(fi);
  }
  return total;
}

double epsilon_inf(const FailureProfile& f, std::span<const int> prone_positions) {
  double total = 0.0;
  for (int i : prone_positions) {
    if (i < 0 || i >= f.width()) {
      throw ConfigError("prone position " + std::to_string(i) +
                        " out of range for width " + std::to_string(f.width()));
    }
    const double fi = f[static_cast<std::size_t>(i)];
    if (fi == 0.0) {
      throw NumericError("position " + std::to_string(i) +
                         " is declared failure-prone but has rate 0: its "
                         "privacy loss is unbounded");
    }
    total += per_bit_epsilon(fi);
  }
  return total;
}

double f_for_epsilon(double eps, int z) {
  if (z < 1) {
    throw ConfigError("f_for_epsilon needs at least one cell, got z = " +
                      std::to_string(z));
  }
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw ConfigError("privacy budget must be finite and non-negative, "
                      "got " + std::to_string(eps));
  }
  return 2.0 / (1.0 + std::exp(eps / static_cast<double>(z)));
}

double droop_bound(std::span<const double> alpha) {
  double total = 0.0;
  for (double a : alpha) {
    if (!(a > 0.5)) {
      throw NumericError("drift factors must exceed 1/2 for the budget "
                         "bound to hold, got " + std::to_string(a));
    }
    total += std::abs(std::log(2.0 * a - 1.0));
  }
  return total;
}

FailureProfile drifted_profile(const FailureProfile& f,
                               std::span<const double> alpha) {
  if (alpha.size() != static_cast<std::size_t>(f.width())) {
    throw ConfigError("drift factor vector has " +
                      std::to_string(alpha.size()) + " entries for width " +
                      std::to_string(f.width()));
  }
  std::vector<double> rates(f.rates());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(alpha[i] >= 0.0) || !std::isfinite(alpha[i])) {
      throw ConfigError("drift factors must be finite and non-negative");
    }
    rates[i] = std::clamp(rates[i] * alpha[i], 0.0, 1.0);
  }
  return FailureProfile(std::move(rates));
}

AdversaryPrior build_prior(PriorKind kind, const CandidateSet& omega,
                           std::span<const std::uint32_t> dataset) {
  switch (kind) {
    case PriorKind::kUniform:
      return {omega, Distribution::uniform(omega.size()), kind};
    case PriorKind::kDatasetInformed: {
      if (dataset.empty()) {
        throw ConfigError("a dataset-informed prior needs a dataset");
      }
      std::vector<double> weights(omega.size(), 0.0);
      for (std::uint32_t v : dataset) {
        if (auto idx = omega.index_of(v)) weights[*idx] += 1.0;
      }
      Distribution dist = [&] {
        try {
          return Distribution::normalized(std::move(weights));
        } catch (const NumericError&) {
          throw NumericError("the dataset assigns zero mass to every "
                             "candidate; the informed prior is undefined");
        }
      }();
      return {omega, std::move(dist), kind};
    }
    case PriorKind::kCustom:
      throw ConfigError("custom priors are built with custom_prior()");
  }
  throw ConfigError("unknown prior kind");
}

AdversaryPrior custom_prior(const CandidateSet& omega,
                            std::vector<double> weights) {
  if (weights.size() != omega.size()) {
    throw ConfigError("custom prior has " + std::to_string(weights.size()) +
                      " weights for " + std::to_string(omega.size()) +
                      " candidates");
  }
  return {omega, Distribution::normalized(std::move(weights)),
          PriorKind::kCustom};
}

CandidateSet indistinguishable_set(const Word& o, const FailureProfile& f) {
  if (o.width() != f.width()) {
    throw ConfigError("observation width " + std::to_string(o.width()) +
                      " does not match profile width " +
                      std::to_string(f.width()));
  }
  const std::vector<int> prone = f.prone_positions();
  if (prone.size() > 20) {
    throw ConfigError("indistinguishable set with " +
                      std::to_string(prone.size()) +
                      " free positions is too large to enumerate");
  }
  std::vector<std::uint32_t> values;
  values.reserve(1u << prone.size());
  const std::uint32_t count = 1u << prone.size();
  for (std::uint32_t assignment = 0; assignment < count; ++assignment) {
    Word candidate = o;
    for (std::size_t b = 0; b < prone.size(); ++b) {
      candidate = candidate.with_bit(prone[b],
                                     static_cast<int>((assignment >> b) & 1u));
    }
    values.push_back(candidate.decode());
  }
  std::sort(values.begin(), values.end());
  return CandidateSet(std::move(values), o.width());
}

namespace {

// Unnormalized posterior scores prior(X) * P(o | X) over the prior's
// candidate set, plus the index of the score maximizer (smallest decoded
// value on ties).
struct Posterior {
  std::vector<double> scores;
  double total;
  std::size_t best;
};

Posterior posterior_scores(const Word& o, const AdversaryPrior& prior,
                           const FailureProfile& f) {
  const CandidateSet& omega = prior.omega;
  std::vector<double> scores(omega.size(), 0.0);
  double total = 0.0;
  std::size_t best = 0;
  double best_score = -1.0;
  std::uint32_t best_value = 0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double s = prior.dist[i] * channel_prob(omega.word(i), o, f);
    scores[i] = s;
    total += s;
    const std::uint32_t v = omega.value(i);
    if (s > best_score || (s == best_score && v < best_value)) {
      best_score = s;
      best_value = v;
      best = i;
    }
  }
  if (total <= 0.0) {
    throw NumericError("observation " + o.to_string() +
                       " has zero posterior mass under the prior");
  }
  return {std::move(scores), total, best};
}

}  // namespace

Word mle_infer(const Word& o, const AdversaryPrior& prior,
               const FailureProfile& f) {
  const Posterior post = posterior_scores(o, prior, f);
  return prior.omega.word(post.best);
}

double ia_meter(const Word& o, const AdversaryPrior& prior,
                const FailureProfile& f) {
  const Posterior post = posterior_scores(o, prior, f);
  const double guess = static_cast<double>(prior.omega.value(post.best));
  double acc = 0.0;
  for (std::size_t i = 0; i < prior.omega.size(); ++i) {
    acc += post.scores[i] *
           std::abs(guess - static_cast<double>(prior.omega.value(i)));
  }
  return acc / post.total;
}

PrivacyReport make_privacy_report(const FailureProfile& f,
                                  std::span<const double> alpha,
                                  bool intact_as_infinite) {
  PrivacyReport report;
  report.intact_as_infinite = intact_as_infinite;
  report.epsilon_total = epsilon_inf(f);
  for (int i = 0; i < f.width(); ++i) {
    const double fi = f[static_cast<std::size_t>(i)];
    PrivacyReport::PerBit bit{i, fi, std::nullopt};
    if (fi > 0.0) bit.epsilon = per_bit_epsilon(fi);
    report.per_bit.push_back(bit);
  }
  if (!alpha.empty()) {
    report.alpha.assign(alpha.begin(), alpha.end());
    report.drift_bound = droop_bound(alpha);
  }
  return report;
}

}  // namespace sramdp
