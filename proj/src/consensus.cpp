#include "stagekit/consensus.hpp"

#include <algorithm>
#include <numeric>

namespace stagekit::consensus {

namespace {

void check_scorers(const std::vector<Hypnogram>& scorers, std::size_t min_count) {
  if (scorers.size() < min_count) {
    fail(ErrorCode::ShapeError,
         "need at least " + std::to_string(min_count) + " scorers, got " +
             std::to_string(scorers.size()));
  }
  for (const Hypnogram& h : scorers) {
    validate(h);
    if (h.size() != scorers[0].size()) {
      fail(ErrorCode::AlignmentError, "scorers disagree on epoch count");
    }
  }
}

std::array<int, kNumStages> vote_counts(const std::vector<Hypnogram>& scorers,
                                        std::size_t t, std::size_t excluded) {
  std::array<int, kNumStages> votes{};
  for (std::size_t i = 0; i < scorers.size(); ++i) {
    if (i == excluded) continue;
    const Stage stage = scorers[i].stages[t];
    if (is_scored(stage)) ++votes[static_cast<std::size_t>(stage)];
  }
  return votes;
}

constexpr std::size_t kNoExclusion = static_cast<std::size_t>(-1);

}  // namespace

StageProbs probabilistic_consensus(const std::vector<Hypnogram>& scorers,
                                   std::size_t excluded, std::size_t t) {
  check_scorers(scorers, 2);
  if (excluded >= scorers.size()) fail(ErrorCode::ShapeError, "excluded scorer out of range");
  if (t >= scorers[0].size()) fail(ErrorCode::ShapeError, "epoch index out of range");

  const auto votes = vote_counts(scorers, t, excluded);
  const int max_votes = *std::max_element(votes.begin(), votes.end());
  if (max_votes == 0) {
    fail(ErrorCode::UndefinedConsensus,
         "all other scorers are masked at epoch " + std::to_string(t));
  }
  StageProbs z{};
  for (std::size_t c = 0; c < kNumStages; ++c) {
    z[c] = static_cast<double>(votes[c]) / static_cast<double>(max_votes);
  }
  return z;
}

double soft_agreement(const std::vector<Hypnogram>& scorers, std::size_t s) {
  check_scorers(scorers, 2);
  if (s >= scorers.size()) fail(ErrorCode::ShapeError, "scorer index out of range");

  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t t = 0; t < scorers[0].size(); ++t) {
    const Stage own = scorers[s].stages[t];
    if (!is_scored(own)) continue;
    const auto votes = vote_counts(scorers, t, s);
    const int max_votes = *std::max_element(votes.begin(), votes.end());
    if (max_votes == 0) continue;  // nobody else scored this epoch
    total += static_cast<double>(votes[static_cast<std::size_t>(own)]) /
             static_cast<double>(max_votes);
    ++counted;
  }
  if (counted == 0) {
    fail(ErrorCode::NoScoredEpochs, "no epochs where scorer and any other scorer are unmasked");
  }
  return total / static_cast<double>(counted);
}

std::vector<double> soft_agreement_all(const std::vector<Hypnogram>& scorers) {
  std::vector<double> out(scorers.size());
  for (std::size_t s = 0; s < scorers.size(); ++s) out[s] = soft_agreement(scorers, s);
  return out;
}

std::map<std::string, double> inter_model_soft_agreement(
    const std::map<std::string, Hypnodensity>& models) {
  std::vector<std::string> names;
  std::vector<Hypnogram> discrete;
  for (const auto& [name, density] : models) {
    names.push_back(name);
    Hypnogram h;
    h.epoch_duration_s = density.epoch_duration_s;
    h.stages.reserve(density.size());
    for (const StageProbs& row : density.probs) h.stages.push_back(argmax_stage(row));
    discrete.push_back(std::move(h));
  }
  std::map<std::string, double> out;
  for (std::size_t s = 0; s < discrete.size(); ++s) {
    out[names[s]] = soft_agreement(discrete, s);
  }
  return out;
}

Hypnogram consensus_hypnogram(const std::vector<Hypnogram>& scorers,
                              const std::vector<std::string>& names,
                              const std::vector<double>& reliability) {
  check_scorers(scorers, 2);
  if (names.size() != scorers.size() || reliability.size() != scorers.size()) {
    fail(ErrorCode::ShapeError, "names/reliability must match the scorer count");
  }

  // Scorer visit order for the tie-break: reliability descending, name ascending.
  std::vector<std::size_t> order(scorers.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (reliability[a] != reliability[b]) return reliability[a] > reliability[b];
    return names[a] < names[b];
  });

  Hypnogram out;
  out.epoch_duration_s = scorers[0].epoch_duration_s;
  out.stages.resize(scorers[0].size(), Stage::Mask);
  for (std::size_t t = 0; t < scorers[0].size(); ++t) {
    const auto votes = vote_counts(scorers, t, kNoExclusion);
    const int max_votes = *std::max_element(votes.begin(), votes.end());
    if (max_votes == 0) continue;  // everyone masked; epoch stays Mask
    std::size_t tied = 0;
    std::size_t winner = 0;
    for (std::size_t c = 0; c < kNumStages; ++c) {
      if (votes[c] == max_votes) {
        ++tied;
        winner = c;
      }
    }
    if (tied > 1) {
      for (std::size_t idx : order) {
        const Stage vote = scorers[idx].stages[t];
        if (is_scored(vote) && votes[static_cast<std::size_t>(vote)] == max_votes) {
          winner = static_cast<std::size_t>(vote);
          break;
        }
      }
    }
    out.stages[t] = static_cast<Stage>(winner);
  }
  return out;
}

Hypnogram consensus_exclude_one(const std::vector<Hypnogram>& scorers,
                                const std::vector<std::string>& names, std::size_t s) {
  check_scorers(scorers, 3);
  if (s >= scorers.size()) fail(ErrorCode::ShapeError, "scorer index out of range");
  std::vector<Hypnogram> rest;
  std::vector<std::string> rest_names;
  for (std::size_t i = 0; i < scorers.size(); ++i) {
    if (i == s) continue;
    rest.push_back(scorers[i]);
    rest_names.push_back(names[i]);
  }
  return consensus_hypnogram(rest, rest_names, soft_agreement_all(rest));
}

StageProbs soft_consensus(const std::vector<Hypnogram>& consensus_set, std::size_t t) {
  if (consensus_set.empty()) fail(ErrorCode::EmptyConsensusSet, "empty consensus set");
  for (const Hypnogram& h : consensus_set) {
    if (t >= h.size()) fail(ErrorCode::ShapeError, "epoch index out of range");
  }
  StageProbs dist{};
  int counted = 0;
  for (const Hypnogram& h : consensus_set) {
    const Stage stage = h.stages[t];
    if (!is_scored(stage)) continue;
    dist[static_cast<std::size_t>(stage)] += 1.0;
    ++counted;
  }
  if (counted == 0) {
    fail(ErrorCode::NoScoredEpochs, "epoch " + std::to_string(t) + " is fully masked");
  }
  for (double& v : dist) v /= static_cast<double>(counted);
  return dist;
}

std::pair<Hypnodensity, std::vector<std::size_t>> soft_consensus_density(
    const std::vector<Hypnogram>& consensus_set) {
  if (consensus_set.empty()) fail(ErrorCode::EmptyConsensusSet, "empty consensus set");
  check_scorers(consensus_set, 1);
  Hypnodensity density;
  density.epoch_duration_s = consensus_set[0].epoch_duration_s;
  std::vector<std::size_t> indices;
  for (std::size_t t = 0; t < consensus_set[0].size(); ++t) {
    bool any = false;
    for (const Hypnogram& h : consensus_set) any = any || is_scored(h.stages[t]);
    if (!any) continue;
    density.probs.push_back(soft_consensus(consensus_set, t));
    indices.push_back(t);
  }
  if (indices.empty()) fail(ErrorCode::NoScoredEpochs, "every epoch is fully masked");
  return {std::move(density), std::move(indices)};
}

std::map<std::string, double> dataset_soft_agreement(
    const std::vector<std::map<std::string, Hypnogram>>& recordings) {
  std::map<std::string, double> sums;
  std::map<std::string, int> counts;
  for (const auto& recording : recordings) {
    std::vector<std::string> names;
    std::vector<Hypnogram> scorers;
    for (const auto& [name, h] : recording) {
      names.push_back(name);
      scorers.push_back(h);
    }
    if (scorers.size() < 2) continue;
    for (std::size_t s = 0; s < scorers.size(); ++s) {
      sums[names[s]] += soft_agreement(scorers, s);
      ++counts[names[s]];
    }
  }
  std::map<std::string, double> out;
  for (const auto& [name, sum] : sums) out[name] = sum / counts[name];
  return out;
}

std::vector<std::string> select_top_k(const std::map<std::string, double>& reliability,
                                      std::size_t k) {
  std::vector<std::pair<std::string, double>> items(reliability.begin(), reliability.end());
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < items.size() && i < k; ++i) out.push_back(items[i].first);
  return out;
}

}  // namespace stagekit::consensus
