#pragma once

#include <cmath>
#include <limits>

namespace qcs {

// Log of n! and of binomial coefficients, backed by a cached cumulative
// table (grown on demand, thread-safe). The table is built by summation
// in long double, which beats lgamma() by a couple of digits for the
// table sizes used here (n up to ~10^4).
double log_factorial(long long n);
double log_binom_coeff(long long n, long long k);

// Probability in the natural-log domain. -inf is the exact-zero marker.
class LogProb {
 public:
  LogProb() : log_(-std::numeric_limits<double>::infinity()) {}

  static LogProb zero() { return LogProb(); }
  static LogProb one() { return from_log(0.0); }
  static LogProb from_log(double l) {
    LogProb p;
    p.log_ = l;
    return p;
  }
  static LogProb from_linear(double v) {
    return v <= 0.0 ? zero() : from_log(std::log(v));
  }

  bool is_zero() const { return std::isinf(log_) && log_ < 0; }
  double log() const { return log_; }
  double linear() const { return is_zero() ? 0.0 : std::exp(log_); }

  LogProb operator*(LogProb other) const {
    if (is_zero() || other.is_zero()) return zero();
    return from_log(log_ + other.log_);
  }

  // 1 - p, clamped against rounding excursions above one.
  LogProb complement() const {
    if (is_zero()) return one();
    if (log_ >= 0.0) return zero();
    if (log_ > -M_LN2) return from_log(std::log(-std::expm1(log_)));
    return from_log(std::log1p(-std::exp(log_)));
  }

 private:
  double log_;
};

// Streaming log-sum-exp with a running maximum and Neumaier-compensated
// accumulation of the shifted exponentials.
class LogSumAccumulator {
 public:
  void add(LogProb term) {
    if (term.is_zero()) return;
    const double l = term.log();
    if (sum_ == 0.0 && comp_ == 0.0) {
      shift_ = l;
      add_shifted(1.0);
      return;
    }
    if (l > shift_) {
      const double rescale = std::exp(shift_ - l);
      sum_ *= rescale;
      comp_ *= rescale;
      shift_ = l;
      add_shifted(1.0);
    } else {
      add_shifted(std::exp(l - shift_));
    }
  }

  LogProb total() const {
    const double s = sum_ + comp_;
    if (s <= 0.0) return LogProb::zero();
    return LogProb::from_log(shift_ + std::log(s));
  }

 private:
  void add_shifted(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double shift_ = 0.0;
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace qcs
