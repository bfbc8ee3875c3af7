#pragma once

#include <span>
#include <vector>

namespace hoalign {

/// T frames x S states of non-negative observation costs.
class EmissionTable {
 public:
  EmissionTable() = default;
  EmissionTable(std::size_t frames, std::size_t states, double fill = 0.0)
      : frames_(frames), states_(states), costs_(frames * states, fill) {}
  EmissionTable(std::size_t frames, std::size_t states, std::vector<double> costs);

  std::size_t frames() const { return frames_; }
  std::size_t states() const { return states_; }
  bool empty() const { return frames_ == 0 || states_ == 0; }

  double operator()(std::size_t t, std::size_t j) const { return costs_[t * states_ + j]; }
  double& operator()(std::size_t t, std::size_t j) { return costs_[t * states_ + j]; }
  std::span<const double> row(std::size_t t) const {
    return std::span<const double>(costs_).subspan(t * states_, states_);
  }
  std::span<double> row(std::size_t t) { return std::span<double>(costs_).subspan(t * states_, states_); }
  const std::vector<double>& costs() const { return costs_; }

 private:
  std::size_t frames_ = 0;
  std::size_t states_ = 0;
  std::vector<double> costs_;
};

}  // namespace hoalign
