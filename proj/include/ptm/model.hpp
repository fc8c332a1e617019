#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ptm/automata.hpp"
#include "ptm/rng.hpp"

namespace ptm {

using BitVector = std::vector<std::uint8_t>;

struct MachineConfig {
  int clauses = 20;           // m, positive even
  int threshold = 10;         // T
  double specificity = 3.0;   // s
  int states_per_action = 100;  // N
  int features = 1;           // o; literal count is 2o
  bool one_hot_probs = false;  // per-sample one-hot instead of clamped votes

  void validate() const;
};

/// One clause: 2o automata, k <= o addressing x_k, k > o addressing not x_{k-o}.
/// Polarity is determined by the clause's 1-based index parity (odd = +).
struct PtmClause {
  std::vector<StateProbabilityVector> spvs;
};

struct ClassicClause {
  std::vector<int> states;  // in [1, 2N]
};

struct PtmMachine {
  MachineConfig config;
  std::vector<PtmClause> clauses;

  /// Probability that the TA for literal k (0-based) of clause j samples
  /// an include state.
  double literal_include_prob(int j, int k) const {
    return clauses[j].spvs[k].include_probability();
  }
};

struct ClassicMachine {
  MachineConfig config;
  std::vector<ClassicClause> clauses;

  double literal_include_prob(int j, int k) const {
    return clauses[j].states[k] > config.states_per_action ? 1.0 : 0.0;
  }
};

PtmMachine make_ptm_machine(const MachineConfig &config);
ClassicMachine make_classic_machine(const MachineConfig &config,
                                    Rng &rng);

inline bool clause_polarity_positive(int clause_index_1based) {
  return clause_index_1based % 2 == 1;
}

enum class EvalMode { Train, Infer };

struct ClauseEvaluation {
  int output = 0;
  std::vector<int> include_nonnegated;  // I_j, 1-based feature indexes
  std::vector<int> include_negated;     // I-bar_j
};

/// Samples every TA of clause j once and evaluates the conjunction.
/// An empty include set yields 1 in Train mode and 0 in Infer mode.
template <class Machine>
ClauseEvaluation evaluate_clause(const Machine &machine, int j,
                                 const BitVector &input, Rng &rng,
                                 EvalMode mode);

/// Sampled outputs of all m clauses for one input.
template <class Machine>
std::vector<int> clause_outputs(const Machine &machine, const BitVector &input,
                                Rng &rng, EvalMode mode);

/// v = sum over odd-indexed clauses minus sum over even-indexed clauses.
int vote_sum(const std::vector<int> &outputs);

/// One-vs-rest collection; a binary problem uses a single machine whose
/// vote sum v stands for class 1 (class 0 scores -v).
template <class Machine>
struct Model {
  MachineConfig config;
  int num_classes = 2;
  std::vector<Machine> machines;  // size 1 when num_classes == 2

  bool binary() const { return num_classes == 2; }
};

using PtmModel = Model<PtmMachine>;
using ClassicModel = Model<ClassicMachine>;

PtmModel make_ptm_model(const MachineConfig &config, int num_classes);
ClassicModel make_classic_model(const MachineConfig &config, int num_classes,
                                Rng &rng);

struct Prediction {
  Eigen::VectorXi votes;  // per-class raw vote sums
  int predicted_class = 0;
};

/// One sampled forward pass. Binary: class 1 iff v >= 0 (tie -> class 1);
/// multiclass: argmax with lowest-index tie-break.
template <class Machine>
Prediction predict_once(const Model<Machine> &model, const BitVector &input,
                        Rng &rng);

struct PredictionSamples {
  std::vector<Eigen::VectorXd> per_sample_probs;  // K valid distributions
  std::vector<Eigen::VectorXi> per_sample_votes;
  int sample_count() const {
    return static_cast<int>(per_sample_probs.size());
  }
};

/// Maps per-class raw votes to a probability vector via
/// score_c = (clamp(v_c, -T, T) + T) / 2T, normalized across classes.
Eigen::VectorXd votes_to_probs(const Eigen::VectorXi &votes, int threshold,
                               bool one_hot);

template <class Machine>
PredictionSamples predict_distribution(const Model<Machine> &model,
                                       const BitVector &input, int samples,
                                       Rng &rng);

}  // namespace ptm
