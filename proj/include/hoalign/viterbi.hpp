#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hoalign/emission_table.hpp"

namespace hoalign {

/// Cost of moving from state `from` at frame t - 1 to state `to` at frame t (t >= 1).
using TransitionCost = std::function<double(std::size_t t, std::size_t from, std::size_t to)>;

struct StatePath {
  std::vector<std::size_t> states;
  double total_cost = 0.0;
  double emission_cost = 0.0;
  double transition_cost = 0.0;  // unweighted sum of transitions along the path
};

/// Objective of a given path: sum of emissions plus lambda times the sum of transitions,
/// accumulated frame by frame in the same order as the decoders.
StatePath score_path(const EmissionTable& emissions, const TransitionCost& transition, double lambda,
                     std::vector<std::size_t> states);

/// Min-sum Viterbi: exact dynamic programming with backpointers in O(T S^2) time. Among equal
/// cost paths, the one that is smallest comparing states from the last frame backwards wins,
/// i.e. the lowest final state, then the lowest predecessor at each step.
StatePath viterbi_decode(const EmissionTable& emissions, const TransitionCost& transition, double lambda);

/// Exhaustive search over all S^T paths with the same objective and tie-break as
/// viterbi_decode. Throws TooLarge when S^T exceeds 1e7.
StatePath brute_force_decode(const EmissionTable& emissions, const TransitionCost& transition, double lambda);

/// Per-frame argmin of the emissions (lowest index on ties), scored under the full objective.
StatePath per_frame_argmin(const EmissionTable& emissions, const TransitionCost& transition, double lambda);

}  // namespace hoalign
