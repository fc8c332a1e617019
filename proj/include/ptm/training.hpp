#pragma once

#include <cstdint>
#include <vector>

#include "ptm/automata.hpp"
#include "ptm/data.hpp"
#include "ptm/model.hpp"

namespace ptm {

struct TrainingConfig {
  int epochs = 100;
  bool shuffle = true;
  std::uint64_t seed = 0;
  bool track_train_accuracy = true;
};

struct EpochStats {
  int epoch = 0;
  long updates_applied = 0;  // clause feedback activations
  double mean_abs_vote = 0.0;
  double train_accuracy = -1.0;  // -1 when not tracked
};

using TrainingHistory = std::vector<EpochStats>;

/// The four TPMs for one (s, N) pair, built once per training run.
struct TpmSet {
  TransitionMatrix tpm1, tpm2, tpm3, tpm4;

  TpmSet(double s, int n_states_per_action);
  const TransitionMatrix &get(TpmKind kind) const;
};

/// Clause-activation probability against the threshold target:
/// (T - u)/2T for y = 1 and (T + u)/2T for y = 0, u = clamp(v, -T, T).
/// Polarity selects the feedback type, not the probability.
double activation_probability(int vote, int threshold, int label,
                              bool positive_polarity);

void type_i_update(PtmClause &clause, int clause_output,
                   const BitVector &literals, const TpmSet &tpms);
void type_ii_update(PtmClause &clause, int clause_output,
                    const BitVector &literals, const TpmSet &tpms);

void type_i_update_classic(ClassicClause &clause, int clause_output,
                           const BitVector &literals, double s, int n, Rng &rng);
void type_ii_update_classic(ClassicClause &clause, int clause_output,
                            const BitVector &literals, double s, int n,
                            Rng &rng);

/// x of length o augmented to (x, not x) of length 2o.
BitVector augment_literals(const BitVector &input);

/// One pass over the (optionally shuffled) dataset, Algorithm-1 style:
/// fresh sampled clause outputs, activation draws, Type I/II routing by
/// (label, polarity). Multiclass trains the true-class machine with
/// target 1 and one uniformly drawn other machine with target 0.
template <class Machine>
EpochStats fit_epoch(Model<Machine> &model, const Dataset &dataset, Rng &rng);

template <class Machine>
TrainingHistory train(Model<Machine> &model, const Dataset &dataset,
                      const TrainingConfig &config);

inline TrainingHistory train_classic(ClassicModel &model,
                                     const Dataset &dataset,
                                     const TrainingConfig &config) {
  return train(model, dataset, config);
}

}  // namespace ptm
