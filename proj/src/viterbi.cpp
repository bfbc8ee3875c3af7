#include "hoalign/viterbi.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "hoalign/error.hpp"

namespace hoalign {

namespace {

void check_inputs(const EmissionTable& emissions, double lambda) {
  if (emissions.empty()) fail(ErrorKind::kEmptyTable, "emission table has no frames or no states");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail(ErrorKind::kInvalidArgument, "transition weight must be >= 0");
  for (double c : emissions.costs()) {
    if (!std::isfinite(c)) fail(ErrorKind::kInvalidArgument, "emission table contains a non-finite cost");
  }
}

// a precedes b in the decoders' tie-break order (compare from the last frame backwards).
bool reverse_lex_less(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  for (std::size_t k = a.size(); k-- > 0;) {
    if (a[k] != b[k]) return a[k] < b[k];
  }
  return false;
}

}  // namespace

StatePath score_path(const EmissionTable& emissions, const TransitionCost& transition, double lambda,
                     std::vector<std::size_t> states) {
  if (states.size() != emissions.frames()) fail(ErrorKind::kSizeMismatch, "path length differs from frame count");
  StatePath path;
  double total = emissions(0, states[0]);
  path.emission_cost = total;
  for (std::size_t t = 1; t < states.size(); ++t) {
    const double a = transition(t, states[t - 1], states[t]);
    const double b = emissions(t, states[t]);
    total = (total + lambda * a) + b;
    path.transition_cost += a;
    path.emission_cost += b;
  }
  path.total_cost = total;
  path.states = std::move(states);
  return path;
}

StatePath viterbi_decode(const EmissionTable& emissions, const TransitionCost& transition, double lambda) {
  check_inputs(emissions, lambda);
  const std::size_t frames = emissions.frames();
  const std::size_t states = emissions.states();

  std::vector<double> prev(emissions.row(0).begin(), emissions.row(0).end());
  std::vector<double> next(states);
  std::vector<std::uint32_t> backpointer(frames * states, 0);

  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t j = 0; j < states; ++j) {
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t arg = 0;
      for (std::size_t i = 0; i < states; ++i) {
        const double v = prev[i] + lambda * transition(t, i, j);
        if (v < best) {
          best = v;
          arg = static_cast<std::uint32_t>(i);
        }
      }
      next[j] = best + emissions(t, j);
      backpointer[t * states + j] = arg;
    }
    prev.swap(next);
  }

  std::size_t last = 0;
  for (std::size_t j = 1; j < states; ++j) {
    if (prev[j] < prev[last]) last = j;
  }
  std::vector<std::size_t> path(frames);
  path[frames - 1] = last;
  for (std::size_t t = frames - 1; t > 0; --t) path[t - 1] = backpointer[t * states + path[t]];

  StatePath result = score_path(emissions, transition, lambda, std::move(path));
  result.total_cost = prev[last];
  return result;
}

StatePath brute_force_decode(const EmissionTable& emissions, const TransitionCost& transition, double lambda) {
  check_inputs(emissions, lambda);
  const std::size_t frames = emissions.frames();
  const std::size_t states = emissions.states();
  double count = std::pow(static_cast<double>(states), static_cast<double>(frames));
  if (count > 1e7) fail(ErrorKind::kTooLarge, "brute force over " + std::to_string(count) + " paths");

  std::vector<std::size_t> current(frames, 0);
  std::optional<StatePath> best;
  for (;;) {
    StatePath candidate = score_path(emissions, transition, lambda, current);
    if (!best || candidate.total_cost < best->total_cost ||
        (candidate.total_cost == best->total_cost && reverse_lex_less(candidate.states, best->states))) {
      best = std::move(candidate);
    }
    std::size_t k = 0;
    while (k < frames && ++current[k] == states) current[k++] = 0;
    if (k == frames) break;
  }
  return *best;
}

StatePath per_frame_argmin(const EmissionTable& emissions, const TransitionCost& transition, double lambda) {
  check_inputs(emissions, lambda);
  std::vector<std::size_t> path(emissions.frames());
  for (std::size_t t = 0; t < emissions.frames(); ++t) {
    const auto row = emissions.row(t);
    std::size_t arg = 0;
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (row[j] < row[arg]) arg = j;
    }
    path[t] = arg;
  }
  return score_path(emissions, transition, lambda, std::move(path));
}

}  // namespace hoalign
