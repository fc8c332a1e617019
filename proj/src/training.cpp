#include "ptm/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ptm {

TpmSet::TpmSet(double s, int n_states_per_action)
    : tpm1(TpmKind::TPM1, s, n_states_per_action),
      tpm2(TpmKind::TPM2, s, n_states_per_action),
      tpm3(TpmKind::TPM3, s, n_states_per_action),
      tpm4(TpmKind::TPM4, s, n_states_per_action) {}

const TransitionMatrix &TpmSet::get(TpmKind kind) const {
  switch (kind) {
    case TpmKind::TPM1: return tpm1;
    case TpmKind::TPM2: return tpm2;
    case TpmKind::TPM3: return tpm3;
    default: return tpm4;
  }
}

double activation_probability(int vote, int threshold, int label,
                              bool /*positive_polarity*/) {
  const double t = threshold;
  const double u = std::clamp(static_cast<double>(vote), -t, t);
  return label == 1 ? (t - u) / (2.0 * t) : (t + u) / (2.0 * t);
}

BitVector augment_literals(const BitVector &input) {
  BitVector literals;
  literals.reserve(2 * input.size());
  literals.insert(literals.end(), input.begin(), input.end());
  for (auto bit : input) literals.push_back(bit ? 0 : 1);
  return literals;
}

void type_i_update(PtmClause &clause, int clause_output,
                   const BitVector &literals, const TpmSet &tpms) {
  if (clause_output == 1) {
    for (std::size_t k = 0; k < literals.size(); ++k)
      apply_tpm_in_place(clause.spvs[k],
                         literals[k] ? tpms.tpm1 : tpms.tpm2);
  } else {
    for (auto &spv : clause.spvs) apply_tpm_in_place(spv, tpms.tpm3);
  }
}

void type_ii_update(PtmClause &clause, int clause_output,
                    const BitVector &literals, const TpmSet &tpms) {
  if (clause_output != 1) return;
  for (std::size_t k = 0; k < literals.size(); ++k)
    if (literals[k] == 0) apply_tpm_in_place(clause.spvs[k], tpms.tpm4);
}

namespace {

void classic_step(int &state, const FeedbackCase &fc, double s, int n,
                  Rng &rng) {
  ClassicAutomatonState current{state, n};
  // the NA cell (clause 1, literal 0, include) is unreachable: an included
  // literal with value 0 forces clause output 0
  state = classic_transition(current, fc, s, rng).state;
}

}  // namespace

void type_i_update_classic(ClassicClause &clause, int clause_output,
                           const BitVector &literals, double s, int n,
                           Rng &rng) {
  for (std::size_t k = 0; k < literals.size(); ++k) {
    FeedbackCase fc{FeedbackType::TypeI, clause_output, literals[k] ? 1 : 0};
    if (clause_output == 1 && literals[k] == 0 &&
        clause.states[k] > n)
      continue;  // NA cell; clause output must have been forced elsewhere
    classic_step(clause.states[k], fc, s, n, rng);
  }
}

void type_ii_update_classic(ClassicClause &clause, int clause_output,
                            const BitVector &literals, double s, int n,
                            Rng &rng) {
  if (clause_output != 1) return;
  for (std::size_t k = 0; k < literals.size(); ++k) {
    if (literals[k] != 0) continue;
    if (clause.states[k] > n) continue;  // NA cell
    FeedbackCase fc{FeedbackType::TypeII, 1, 0};
    classic_step(clause.states[k], fc, s, n, rng);
  }
}

namespace {

void apply_feedback(PtmMachine &machine, int clause_index, FeedbackType type,
                    int clause_output, const BitVector &literals,
                    const TpmSet &tpms, Rng & /*rng*/) {
  if (type == FeedbackType::TypeI)
    type_i_update(machine.clauses[clause_index], clause_output, literals, tpms);
  else
    type_ii_update(machine.clauses[clause_index], clause_output, literals,
                   tpms);
}

void apply_feedback(ClassicMachine &machine, int clause_index,
                    FeedbackType type, int clause_output,
                    const BitVector &literals, const TpmSet & /*tpms*/,
                    Rng &rng) {
  auto &clause = machine.clauses[clause_index];
  const double s = machine.config.specificity;
  const int n = machine.config.states_per_action;
  if (type == FeedbackType::TypeI)
    type_i_update_classic(clause, clause_output, literals, s, n, rng);
  else
    type_ii_update_classic(clause, clause_output, literals, s, n, rng);
}

/// One Algorithm-1 round for a single binary machine and target bit y.
template <class Machine>
long train_sample(Machine &machine, const BitVector &input, int y,
                  const TpmSet &tpms, Rng &rng, long &abs_vote_acc) {
  const auto outputs = clause_outputs(machine, input, rng, EvalMode::Train);
  const int v = vote_sum(outputs);
  abs_vote_acc += std::abs(v);
  const BitVector literals = augment_literals(input);
  long updates = 0;
  for (int j = 0; j < machine.config.clauses; ++j) {
    const bool positive = clause_polarity_positive(j + 1);
    const FeedbackType type =
        ((y == 1) == positive) ? FeedbackType::TypeI : FeedbackType::TypeII;
    const double p =
        activation_probability(v, machine.config.threshold, y, positive);
    if (!bernoulli(rng, p)) continue;
    apply_feedback(machine, j, type, outputs[j], literals, tpms, rng);
    ++updates;
  }
  return updates;
}

}  // namespace

template <class Machine>
EpochStats fit_epoch(Model<Machine> &model, const Dataset &dataset, Rng &rng) {
  EpochStats stats;
  if (dataset.size() == 0) return stats;
  if (dataset.feature_count() != model.config.features)
    throw std::invalid_argument("dataset feature width mismatch");

  TpmSet tpms(model.config.specificity, model.config.states_per_action);
  long abs_vote_acc = 0;
  long rounds = 0;
  for (int i = 0; i < dataset.size(); ++i) {
    const int y = dataset.labels[i];
    if (y < 0 || y >= model.num_classes)
      throw std::invalid_argument("label out of range");
    const BitVector &input = dataset.features[i];
    if (model.binary()) {
      stats.updates_applied +=
          train_sample(model.machines[0], input, y, tpms, rng, abs_vote_acc);
      ++rounds;
    } else {
      stats.updates_applied +=
          train_sample(model.machines[y], input, 1, tpms, rng, abs_vote_acc);
      // one uniformly drawn negative class per sample
      int other = static_cast<int>(rng() % (model.num_classes - 1));
      if (other >= y) ++other;
      stats.updates_applied +=
          train_sample(model.machines[other], input, 0, tpms, rng,
                       abs_vote_acc);
      rounds += 2;
    }
  }
  stats.mean_abs_vote =
      rounds > 0 ? static_cast<double>(abs_vote_acc) / rounds : 0.0;
  return stats;
}

template <class Machine>
TrainingHistory train(Model<Machine> &model, const Dataset &dataset,
                      const TrainingConfig &config) {
  if (config.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  TrainingHistory history;
  std::vector<int> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  Dataset shuffled = dataset;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng = make_rng(derive_seed(config.seed, epoch));
    if (config.shuffle) {
      std::shuffle(order.begin(), order.end(), rng);
      for (int i = 0; i < dataset.size(); ++i) {
        shuffled.features[i] = dataset.features[order[i]];
        shuffled.labels[i] = dataset.labels[order[i]];
      }
    }
    EpochStats stats =
        fit_epoch(model, config.shuffle ? shuffled : dataset, rng);
    stats.epoch = epoch;
    if (config.track_train_accuracy && dataset.size() > 0) {
      Rng eval_rng = make_rng(derive_seed(config.seed, 0x9000 + epoch));
      int correct = 0;
      for (int i = 0; i < dataset.size(); ++i)
        if (predict_once(model, dataset.features[i], eval_rng)
                .predicted_class == dataset.labels[i])
          ++correct;
      stats.train_accuracy = static_cast<double>(correct) / dataset.size();
    }
    history.push_back(stats);
  }
  return history;
}

template EpochStats fit_epoch<PtmMachine>(PtmModel &, const Dataset &, Rng &);
template EpochStats fit_epoch<ClassicMachine>(ClassicModel &, const Dataset &,
                                              Rng &);
template TrainingHistory train<PtmMachine>(PtmModel &, const Dataset &,
                                           const TrainingConfig &);
template TrainingHistory train<ClassicMachine>(ClassicModel &, const Dataset &,
                                               const TrainingConfig &);

}  // namespace ptm
