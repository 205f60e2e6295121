#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "stagekit/types.hpp"

namespace stagekit::consensus {

/// Normalized vote distribution of the scorers other than `excluded` at
/// epoch `t`: votes divided by the maximal vote count, so every maximal
/// stage scores exactly 1. Masked scorers do not vote.
StageProbs probabilistic_consensus(const std::vector<Hypnogram>& scorers,
                                   std::size_t excluded, std::size_t t);

/// Mean credit a scorer receives from the others' vote distribution over the
/// epochs where the scorer is unmasked and at least one other scorer votes.
double soft_agreement(const std::vector<Hypnogram>& scorers, std::size_t s);

std::vector<double> soft_agreement_all(const std::vector<Hypnogram>& scorers);

/// Same computation with each model's argmax hypnogram treated as a scorer.
std::map<std::string, double> inter_model_soft_agreement(
    const std::map<std::string, Hypnodensity>& models);

/// Per-epoch majority vote over `scorers`. Ties are resolved by the decision
/// of the most reliable participating scorer (highest `reliability`, then
/// lexicographically smallest name) whose vote is among the tied stages.
/// Epochs where every scorer is masked come out as Mask.
Hypnogram consensus_hypnogram(const std::vector<Hypnogram>& scorers,
                              const std::vector<std::string>& names,
                              const std::vector<double>& reliability);

/// Exclude-one mode: scorer `s` is removed and reliabilities are the
/// per-recording soft-agreements of the remaining scorers.
Hypnogram consensus_exclude_one(const std::vector<Hypnogram>& scorers,
                                const std::vector<std::string>& names, std::size_t s);

/// Empirical stage distribution of the consensus set at epoch `t`.
StageProbs soft_consensus(const std::vector<Hypnogram>& consensus_set, std::size_t t);

/// Soft-consensus rows for every epoch where at least one scorer is
/// unmasked, plus the list of those epoch indices.
std::pair<Hypnodensity, std::vector<std::size_t>> soft_consensus_density(
    const std::vector<Hypnogram>& consensus_set);

/// Dataset-level reliability: mean per-recording soft-agreement over the
/// recordings where the scorer appears.
std::map<std::string, double> dataset_soft_agreement(
    const std::vector<std::map<std::string, Hypnogram>>& recordings);

/// The k most reliable scorer names, descending reliability with
/// lexicographic tie-break.
std::vector<std::string> select_top_k(const std::map<std::string, double>& reliability,
                                      std::size_t k);

}  // namespace stagekit::consensus
