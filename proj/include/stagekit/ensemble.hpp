#pragma once

#include <vector>

#include "stagekit/types.hpp"

namespace stagekit::ensemble {

/// Element-wise average of member hypnodensities. Output rows sum to 1.
Hypnodensity soft_vote(const std::vector<const Hypnodensity*>& members);
Hypnodensity soft_vote(const std::vector<Hypnodensity>& members);

/// Per-epoch modal stage among the channels' argmax labels. Ties fall to the
/// highest summed probability mass over the tied stages, then lowest code.
Hypnogram channel_majority_vote(const std::vector<const Hypnodensity*>& channels);
Hypnogram channel_majority_vote(const std::vector<Hypnodensity>& channels);

}  // namespace stagekit::ensemble
