#include "ptm/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace ptm {

void MachineConfig::validate() const {
  if (clauses < 2 || clauses % 2 != 0)
    throw std::invalid_argument("clause count must be a positive even integer");
  if (threshold < 1) throw std::invalid_argument("threshold must be >= 1");
  if (specificity < 1.0)
    throw std::invalid_argument("specificity must be >= 1");
  if (states_per_action < 1)
    throw std::invalid_argument("states per action must be >= 1");
  if (features < 1) throw std::invalid_argument("feature count must be >= 1");
}

PtmMachine make_ptm_machine(const MachineConfig &config) {
  config.validate();
  PtmMachine machine;
  machine.config = config;
  machine.clauses.resize(config.clauses);
  for (auto &clause : machine.clauses)
    clause.spvs.assign(2 * config.features,
                       new_spv(config.states_per_action));
  return machine;
}

ClassicMachine make_classic_machine(const MachineConfig &config, Rng &rng) {
  config.validate();
  ClassicMachine machine;
  machine.config = config;
  machine.clauses.resize(config.clauses);
  const int n = config.states_per_action;
  for (auto &clause : machine.clauses) {
    clause.states.resize(2 * config.features);
    for (auto &state : clause.states)
      state = bernoulli(rng, 0.5) ? n : n + 1;  // S_N or S_{N+1}
  }
  return machine;
}

template <class Machine>
ClauseEvaluation evaluate_clause(const Machine &machine, int j,
                                 const BitVector &input, Rng &rng,
                                 EvalMode mode) {
  const int o = machine.config.features;
  if (static_cast<int>(input.size()) != o)
    throw std::invalid_argument("input length does not match feature count");
  ClauseEvaluation eval;
  bool satisfied = true;
  for (int k = 0; k < 2 * o; ++k) {
    // sampled state > S_N iff an include state was drawn; the draw reduces
    // to a Bernoulli on the include mass
    if (!bernoulli(rng, machine.literal_include_prob(j, k))) continue;
    if (k < o) {
      eval.include_nonnegated.push_back(k + 1);
      if (input[k] == 0) satisfied = false;
    } else {
      eval.include_negated.push_back(k - o + 1);
      if (input[k - o] != 0) satisfied = false;
    }
  }
  const bool empty =
      eval.include_nonnegated.empty() && eval.include_negated.empty();
  if (empty)
    eval.output = mode == EvalMode::Train ? 1 : 0;
  else
    eval.output = satisfied ? 1 : 0;
  return eval;
}

template <class Machine>
std::vector<int> clause_outputs(const Machine &machine, const BitVector &input,
                                Rng &rng, EvalMode mode) {
  std::vector<int> outputs(machine.config.clauses);
  for (int j = 0; j < machine.config.clauses; ++j)
    outputs[j] = evaluate_clause(machine, j, input, rng, mode).output;
  return outputs;
}

int vote_sum(const std::vector<int> &outputs) {
  int v = 0;
  for (std::size_t j = 0; j < outputs.size(); ++j)
    v += clause_polarity_positive(static_cast<int>(j) + 1) ? outputs[j]
                                                           : -outputs[j];
  return v;
}

PtmModel make_ptm_model(const MachineConfig &config, int num_classes) {
  if (num_classes < 2) throw std::invalid_argument("need at least 2 classes");
  PtmModel model;
  model.config = config;
  model.num_classes = num_classes;
  const int machines = num_classes == 2 ? 1 : num_classes;
  for (int c = 0; c < machines; ++c)
    model.machines.push_back(make_ptm_machine(config));
  return model;
}

ClassicModel make_classic_model(const MachineConfig &config, int num_classes,
                                Rng &rng) {
  if (num_classes < 2) throw std::invalid_argument("need at least 2 classes");
  ClassicModel model;
  model.config = config;
  model.num_classes = num_classes;
  const int machines = num_classes == 2 ? 1 : num_classes;
  for (int c = 0; c < machines; ++c)
    model.machines.push_back(make_classic_machine(config, rng));
  return model;
}

template <class Machine>
Prediction predict_once(const Model<Machine> &model, const BitVector &input,
                        Rng &rng) {
  Prediction pred;
  pred.votes.resize(model.num_classes);
  if (model.binary()) {
    const int v = vote_sum(
        clause_outputs(model.machines[0], input, rng, EvalMode::Infer));
    pred.votes << -v, v;
    pred.predicted_class = v >= 0 ? 1 : 0;
  } else {
    for (int c = 0; c < model.num_classes; ++c)
      pred.votes(c) = vote_sum(
          clause_outputs(model.machines[c], input, rng, EvalMode::Infer));
    int best = 0;
    for (int c = 1; c < model.num_classes; ++c)
      if (pred.votes(c) > pred.votes(best)) best = c;
    pred.predicted_class = best;
  }
  return pred;
}

Eigen::VectorXd votes_to_probs(const Eigen::VectorXi &votes, int threshold,
                               bool one_hot) {
  const int classes = static_cast<int>(votes.size());
  Eigen::VectorXd probs(classes);
  if (one_hot) {
    int best = 0;
    for (int c = 1; c < classes; ++c)
      if (votes(c) > votes(best)) best = c;
    probs.setZero();
    probs(best) = 1.0;
    return probs;
  }
  const double t = threshold;
  for (int c = 0; c < classes; ++c) {
    const double u = std::clamp(static_cast<double>(votes(c)), -t, t);
    probs(c) = (u + t) / (2.0 * t);
  }
  const double total = probs.sum();
  if (total > 0.0)
    probs /= total;
  else
    probs.setConstant(1.0 / classes);
  return probs;
}

template <class Machine>
PredictionSamples predict_distribution(const Model<Machine> &model,
                                       const BitVector &input, int samples,
                                       Rng &rng) {
  if (samples < 1)
    throw std::invalid_argument("sample count must be >= 1");
  PredictionSamples result;
  result.per_sample_probs.reserve(samples);
  result.per_sample_votes.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    Rng sub = make_rng(derive_seed(rng(), static_cast<std::uint64_t>(k)));
    Prediction pred = predict_once(model, input, sub);
    result.per_sample_votes.push_back(pred.votes);
    result.per_sample_probs.push_back(votes_to_probs(
        pred.votes, model.config.threshold, model.config.one_hot_probs));
  }
  return result;
}

template ClauseEvaluation evaluate_clause<PtmMachine>(const PtmMachine &, int,
                                                      const BitVector &, Rng &,
                                                      EvalMode);
template ClauseEvaluation evaluate_clause<ClassicMachine>(
    const ClassicMachine &, int, const BitVector &, Rng &, EvalMode);
template std::vector<int> clause_outputs<PtmMachine>(const PtmMachine &,
                                                     const BitVector &, Rng &,
                                                     EvalMode);
template std::vector<int> clause_outputs<ClassicMachine>(const ClassicMachine &,
                                                         const BitVector &,
                                                         Rng &, EvalMode);
template Prediction predict_once<PtmMachine>(const PtmModel &,
                                             const BitVector &, Rng &);
template Prediction predict_once<ClassicMachine>(const ClassicModel &,
                                                 const BitVector &, Rng &);
template PredictionSamples predict_distribution<PtmMachine>(const PtmModel &,
                                                            const BitVector &,
                                                            int, Rng &);
template PredictionSamples predict_distribution<ClassicMachine>(
    const ClassicModel &, const BitVector &, int, Rng &);

}  // namespace ptm
