#pragma once

#include <cmath>
#include <cstdint>

namespace rmtfid {

// One-pass mean/variance (Welford) with the pairwise combination rule of
// Chan, Golub and LeVeque for merging partial results.
class RunningMoments {
 public:
  RunningMoments() = default;
  RunningMoments(std::int64_t count, double mean, double m2)
      : count_(count), mean_(mean), m2_(m2) {}

  void add(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  static RunningMoments merge(const RunningMoments& a, const RunningMoments& b) noexcept {
    if (a.count_ == 0) return b;
    if (b.count_ == 0) return a;
    const double na = static_cast<double>(a.count_);
    const double nb = static_cast<double>(b.count_);
    const double n = na + nb;
    const double delta = b.mean_ - a.mean_;
    RunningMoments out;
    out.count_ = a.count_ + b.count_;
    out.mean_ = (na * a.mean_ + nb * b.mean_) / n;
    out.m2_ = a.m2_ + b.m2_ + delta * delta * na * nb / n;
    return out;
  }

  std::int64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double m2() const noexcept { return m2_; }

  double variance() const noexcept {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  // Standard error of the mean.
  double standard_error() const noexcept {
    return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }

 private:
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace rmtfid
