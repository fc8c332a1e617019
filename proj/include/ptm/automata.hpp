#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

#include "ptm/rng.hpp"

namespace ptm {

// States are indexed 1..2N. S_1..S_N encode action "exclude",
// S_{N+1}..S_{2N} encode action "include".

/// Probability distribution over the 2N states of one Tsetlin automaton.
class StateProbabilityVector {
 public:
  explicit StateProbabilityVector(int n_states_per_action);
  StateProbabilityVector(Eigen::VectorXd probs, int n_states_per_action);

  int states_per_action() const { return n_; }
  int size() const { return 2 * n_; }

  const Eigen::VectorXd &probs() const { return probs_; }

  /// Probability of state i (1-based state index).
  double prob(int state) const { return probs_(state - 1); }

  /// Total mass on the include half, sum over S_{N+1}..S_{2N}.
  double include_probability() const { return include_mass_; }

  /// Categorical draw; returns a 1-based state index.
  int sample_state(Rng &rng) const;

  bool is_valid_distribution(double tol = 1e-9) const;

  // Mutating interface used by apply_tpm; keeps the include-mass cache
  // and the renormalization invariant in one place.
  void assign(const Eigen::VectorXd &probs);

 private:
  Eigen::VectorXd probs_;
  int n_;
  double include_mass_;
};

enum class TpmKind { TPM1, TPM2, TPM3, TPM4 };

/// Banded column-stochastic 2N x 2N one-step operator for one feedback
/// column. Each column j has mass stay(j) on the diagonal and
/// move(j) on state j + dir(j); stored per column, never dense.
class TransitionMatrix {
 public:
  TransitionMatrix(TpmKind kind, double s, int n_states_per_action);

  TpmKind kind() const { return kind_; }
  double specificity() const { return s_; }
  int states_per_action() const { return n_; }
  int size() const { return 2 * n_; }

  /// Diagonal entry of column `state` (1-based).
  double stay(int state) const { return stay_(state - 1); }
  /// Off-diagonal mass of column `state`.
  double move(int state) const { return move_(state - 1); }
  /// Destination of the off-diagonal mass: -1, 0 or +1 relative step.
  int dir(int state) const { return dir_(state - 1); }

 private:
  TpmKind kind_;
  double s_;
  int n_;
  Eigen::VectorXd stay_;
  Eigen::VectorXd move_;
  Eigen::VectorXi dir_;
};

StateProbabilityVector new_spv(int n_states_per_action);

TransitionMatrix build_tpm(TpmKind kind, double s, int n_states_per_action);

/// result[i] = sum_j M[i][j] spv[j], renormalized to sum exactly 1.
StateProbabilityVector apply_tpm(const StateProbabilityVector &spv,
                                 const TransitionMatrix &tpm);

/// In-place variant used by the training loop.
void apply_tpm_in_place(StateProbabilityVector &spv,
                        const TransitionMatrix &tpm);

inline double include_probability(const StateProbabilityVector &spv) {
  return spv.include_probability();
}

inline int sample_state(const StateProbabilityVector &spv, Rng &rng) {
  return spv.sample_state(rng);
}

// --- classic (point-state) automaton, the baseline / Monte-Carlo oracle ---

enum class FeedbackType { TypeI, TypeII };

struct FeedbackCase {
  FeedbackType feedback_type;
  int clause_output;  // 0 or 1
  int literal_value;  // 0 or 1
};

struct ClassicAutomatonState {
  int state;  // in [1, 2N]
  int n_states_per_action;

  bool include() const { return state > n_states_per_action; }
};

struct InvalidFeedbackCase : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Table-1 probabilities for one automaton action under one feedback case.
struct FeedbackProbabilities {
  double reward;
  double inaction;
  double penalty;
  bool not_applicable;  // the NA cells (clause 1, literal 0, include)
};

FeedbackProbabilities feedback_probabilities(const FeedbackCase &fc,
                                             bool include, double s);

/// One stochastic reward/inaction/penalty step. Reward deepens the current
/// action (saturating at S_1 / S_2N), penalty moves one step toward the
/// opposite action. Throws InvalidFeedbackCase on an NA cell.
ClassicAutomatonState classic_transition(const ClassicAutomatonState &state,
                                         const FeedbackCase &fc, double s,
                                         Rng &rng);

/// The TPM equivalent to a feedback-table column; cases whose column is the
/// identity return false and leave `kind` untouched.
bool tpm_kind_for_case(const FeedbackCase &fc, TpmKind &kind);

}  // namespace ptm
