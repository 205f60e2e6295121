#include "stagekit/ensemble.hpp"

#include <array>

namespace stagekit::ensemble {

namespace {

void check_members(const std::vector<const Hypnodensity*>& members, ErrorCode empty_code,
                   const char* what) {
  if (members.empty()) fail(empty_code, what);
  const std::size_t t = members[0]->size();
  for (const Hypnodensity* m : members) {
    validate(*m);
    if (m->size() != t) {
      fail(ErrorCode::AlignmentError, "members disagree on epoch count");
    }
    if (m->epoch_duration_s != members[0]->epoch_duration_s) {
      fail(ErrorCode::AlignmentError, "members disagree on epoch duration");
    }
  }
}

std::vector<const Hypnodensity*> as_pointers(const std::vector<Hypnodensity>& members) {
  std::vector<const Hypnodensity*> ptrs;
  ptrs.reserve(members.size());
  for (const Hypnodensity& m : members) ptrs.push_back(&m);
  return ptrs;
}

}  // namespace

Hypnodensity soft_vote(const std::vector<const Hypnodensity*>& members) {
  check_members(members, ErrorCode::EmptyEnsemble, "soft_vote needs at least one member");
  const std::size_t t = members[0]->size();
  const double inv_m = 1.0 / static_cast<double>(members.size());

  Hypnodensity out;
  out.epoch_duration_s = members[0]->epoch_duration_s;
  out.probs.resize(t);
  for (std::size_t i = 0; i < t; ++i) {
    StageProbs& row = out.probs[i];
    row.fill(0.0);
    for (const Hypnodensity* m : members) {
      for (std::size_t c = 0; c < kNumStages; ++c) row[c] += m->probs[i][c];
    }
    for (double& v : row) v *= inv_m;
    normalize_row(row);
  }
  return out;
}

Hypnodensity soft_vote(const std::vector<Hypnodensity>& members) {
  return soft_vote(as_pointers(members));
}

Hypnogram channel_majority_vote(const std::vector<const Hypnodensity*>& channels) {
  check_members(channels, ErrorCode::EmptyEnsemble, "majority vote needs at least one channel");
  const std::size_t t = channels[0]->size();

  Hypnogram out;
  out.epoch_duration_s = channels[0]->epoch_duration_s;
  out.stages.resize(t);
  for (std::size_t i = 0; i < t; ++i) {
    std::array<int, kNumStages> votes{};
    std::array<double, kNumStages> mass{};
    for (const Hypnodensity* ch : channels) {
      const StageProbs& row = ch->probs[i];
      ++votes[static_cast<std::size_t>(argmax_stage(row))];
      for (std::size_t c = 0; c < kNumStages; ++c) mass[c] += row[c];
    }
    int max_votes = 0;
    for (int v : votes) max_votes = std::max(max_votes, v);
    std::size_t best = kNumStages;
    for (std::size_t c = 0; c < kNumStages; ++c) {
      if (votes[c] != max_votes) continue;
      if (best == kNumStages || mass[c] > mass[best]) best = c;
    }
    out.stages[i] = static_cast<Stage>(best);
  }
  return out;
}

Hypnogram channel_majority_vote(const std::vector<Hypnodensity>& channels) {
  return channel_majority_vote(as_pointers(channels));
}

}  // namespace stagekit::ensemble
