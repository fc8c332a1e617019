#include "ptm/automata.hpp"

#include <cmath>
#include <stdexcept>

namespace ptm {

StateProbabilityVector::StateProbabilityVector(int n_states_per_action)
    : n_(n_states_per_action) {
  if (n_ < 1) throw std::invalid_argument("states per action must be >= 1");
  probs_ = Eigen::VectorXd::Zero(2 * n_);
  probs_(n_ - 1) = 0.5;  // S_N
  probs_(n_) = 0.5;      // S_{N+1}
  include_mass_ = 0.5;
}

StateProbabilityVector::StateProbabilityVector(Eigen::VectorXd probs,
                                               int n_states_per_action)
    : probs_(std::move(probs)), n_(n_states_per_action) {
  if (n_ < 1 || probs_.size() != 2 * n_)
    throw std::invalid_argument("SPV length must be exactly 2N");
  include_mass_ = probs_.tail(n_).sum();
}

void StateProbabilityVector::assign(const Eigen::VectorXd &probs) {
  if (probs.size() != probs_.size())
    throw std::invalid_argument("SPV dimension mismatch");
  probs_ = probs;
  include_mass_ = probs_.tail(n_).sum();
}

int StateProbabilityVector::sample_state(Rng &rng) const {
  double u = uniform01(rng);
  double acc = 0.0;
  for (int i = 0; i < probs_.size(); ++i) {
    acc += probs_(i);
    if (u < acc) return i + 1;
  }
  // u landed in the rounding slack at the top; return the last nonzero state.
  for (int i = static_cast<int>(probs_.size()) - 1; i >= 0; --i)
    if (probs_(i) > 0.0) return i + 1;
  return static_cast<int>(probs_.size());
}

bool StateProbabilityVector::is_valid_distribution(double tol) const {
  if ((probs_.array() < 0.0).any()) return false;
  return std::abs(probs_.sum() - 1.0) <= tol;
}

StateProbabilityVector new_spv(int n_states_per_action) {
  return StateProbabilityVector(n_states_per_action);
}

TransitionMatrix::TransitionMatrix(TpmKind kind, double s,
                                   int n_states_per_action)
    : kind_(kind), s_(s), n_(n_states_per_action) {
  if (s_ < 1.0) throw std::invalid_argument("specificity must be >= 1");
  if (n_ < 1) throw std::invalid_argument("states per action must be >= 1");
  const int m = 2 * n_;
  stay_.resize(m);
  move_.resize(m);
  dir_.resize(m);
  const double inv_s = 1.0 / s_;
  const double rest = (s_ - 1.0) / s_;
  for (int i = 0; i < m; ++i) {
    const int state = i + 1;
    const bool include = state > n_;
    double stay = 1.0, move = 0.0;
    int dir = 0;
    switch (kind_) {
      case TpmKind::TPM1:
        // every state steps toward S_2N w.p. (s-1)/s; S_2N absorbing
        if (state < m) {
          stay = inv_s;
          move = rest;
          dir = +1;
        }
        break;
      case TpmKind::TPM2:
        // exclude states step toward S_1 w.p. 1/s; S_1 absorbing; include identity
        if (!include && state > 1) {
          stay = rest;
          move = inv_s;
          dir = -1;
        }
        break;
      case TpmKind::TPM3:
        // every state steps toward S_1 w.p. 1/s; S_1 absorbing
        if (state > 1) {
          stay = rest;
          move = inv_s;
          dir = -1;
        }
        break;
      case TpmKind::TPM4:
        // exclude states step toward include w.p. 1; include identity
        if (!include) {
          stay = 0.0;
          move = 1.0;
          dir = +1;
        }
        break;
    }
    stay_(i) = stay;
    move_(i) = move;
    dir_(i) = dir;
  }
}

TransitionMatrix build_tpm(TpmKind kind, double s, int n_states_per_action) {
  return TransitionMatrix(kind, s, n_states_per_action);
}

void apply_tpm_in_place(StateProbabilityVector &spv,
                        const TransitionMatrix &tpm) {
  if (spv.size() != tpm.size())
    throw std::invalid_argument("SPV / TPM dimension mismatch");
  const int m = spv.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  const auto &p = spv.probs();
  for (int j = 0; j < m; ++j) {
    const double pj = p(j);
    if (pj == 0.0) continue;
    const int state = j + 1;
    out(j) += tpm.stay(state) * pj;
    const int d = tpm.dir(state);
    if (d != 0) out(j + d) += tpm.move(state) * pj;
  }
  // columns are exactly stochastic; renormalize away accumulated drift
  out /= out.sum();
  spv.assign(out);
}

StateProbabilityVector apply_tpm(const StateProbabilityVector &spv,
                                 const TransitionMatrix &tpm) {
  StateProbabilityVector result = spv;
  apply_tpm_in_place(result, tpm);
  return result;
}

FeedbackProbabilities feedback_probabilities(const FeedbackCase &fc,
                                             bool include, double s) {
  const double inv_s = 1.0 / s;
  const double rest = (s - 1.0) / s;
  FeedbackProbabilities p{0.0, 1.0, 0.0, false};
  if (fc.feedback_type == FeedbackType::TypeI) {
    if (fc.clause_output == 1 && fc.literal_value == 1) {
      if (include)
        p = {rest, inv_s, 0.0, false};
      else
        p = {0.0, inv_s, rest, false};
    } else if (fc.clause_output == 1 && fc.literal_value == 0) {
      if (include)
        p = {0.0, 0.0, 0.0, true};  // NA
      else
        p = {inv_s, rest, 0.0, false};
    } else {  // clause output 0, either literal value
      if (include)
        p = {0.0, rest, inv_s, false};
      else
        p = {inv_s, rest, 0.0, false};
    }
  } else {  // Type II
    if (fc.clause_output == 1 && fc.literal_value == 0) {
      if (include)
        p = {0.0, 0.0, 0.0, true};  // NA
      else
        p = {0.0, 0.0, 1.0, false};
    }
    // all other Type II columns are pure inaction
  }
  return p;
}

ClassicAutomatonState classic_transition(const ClassicAutomatonState &state,
                                         const FeedbackCase &fc, double s,
                                         Rng &rng) {
  const int n = state.n_states_per_action;
  if (state.state < 1 || state.state > 2 * n)
    throw std::invalid_argument("automaton state out of range");
  const bool include = state.include();
  const FeedbackProbabilities p = feedback_probabilities(fc, include, s);
  if (p.not_applicable)
    throw InvalidFeedbackCase(
        "feedback table cell is NA for an included literal with value 0");
  const double u = uniform01(rng);
  int next = state.state;
  if (u < p.reward) {
    // deepen the current action, saturating at the boundary
    next = include ? std::min(state.state + 1, 2 * n)
                   : std::max(state.state - 1, 1);
  } else if (u < p.reward + p.penalty) {
    // one step toward the opposite action; never leaves [1, 2N]
    next = include ? state.state - 1 : state.state + 1;
  }
  return {next, n};
}

bool tpm_kind_for_case(const FeedbackCase &fc, TpmKind &kind) {
  if (fc.feedback_type == FeedbackType::TypeI) {
    if (fc.clause_output == 1)
      kind = fc.literal_value == 1 ? TpmKind::TPM1 : TpmKind::TPM2;
    else
      kind = TpmKind::TPM3;
    return true;
  }
  if (fc.clause_output == 1 && fc.literal_value == 0) {
    kind = TpmKind::TPM4;
    return true;
  }
  return false;  // identity column
}

}  // namespace ptm
