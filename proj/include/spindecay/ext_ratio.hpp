#pragma once

#include <cmath>
#include <compare>
#include <limits>

namespace spindecay {

// A ratio R in [0, +inf] with explicit zero and infinity. Finite values are
// stored as ln R so long products of small factors do not underflow.
class ExtRatio {
 public:
  enum class Tag { kZero, kFinite, kInfinite };

  constexpr ExtRatio() = default;

  static constexpr ExtRatio Zero() { return ExtRatio(Tag::kZero, 0.0); }
  static constexpr ExtRatio Infinite() { return ExtRatio(Tag::kInfinite, 0.0); }
  static constexpr ExtRatio One() { return ExtRatio(Tag::kFinite, 0.0); }
  static ExtRatio FromLog(double log_value) {
    if (log_value == -std::numeric_limits<double>::infinity()) return Zero();
    if (log_value == std::numeric_limits<double>::infinity()) return Infinite();
    return ExtRatio(Tag::kFinite, log_value);
  }
  static ExtRatio FromValue(double value) {
    if (value <= 0.0) return Zero();
    if (std::isinf(value)) return Infinite();
    return ExtRatio(Tag::kFinite, std::log(value));
  }

  Tag tag() const { return tag_; }
  bool is_zero() const { return tag_ == Tag::kZero; }
  bool is_finite() const { return tag_ == Tag::kFinite; }
  bool is_infinite() const { return tag_ == Tag::kInfinite; }

  // ln R; -inf for zero and +inf for infinity.
  double log_value() const {
    switch (tag_) {
      case Tag::kZero:
        return -std::numeric_limits<double>::infinity();
      case Tag::kInfinite:
        return std::numeric_limits<double>::infinity();
      default:
        return log_;
    }
  }
  double value() const { return std::exp(log_value()); }

  // p = R / (1 + R).
  double probability() const {
    switch (tag_) {
      case Tag::kZero:
        return 0.0;
      case Tag::kInfinite:
        return 1.0;
      default:
        return 1.0 / (1.0 + std::exp(-log_));
    }
  }
  // 1 - p = 1 / (1 + R), computed without cancellation.
  double complement_probability() const {
    switch (tag_) {
      case Tag::kZero:
        return 1.0;
      case Tag::kInfinite:
        return 0.0;
      default:
        return 1.0 / (1.0 + std::exp(log_));
    }
  }

  friend std::partial_ordering operator<=>(const ExtRatio& a, const ExtRatio& b) {
    return a.log_value() <=> b.log_value();
  }
  friend bool operator==(const ExtRatio& a, const ExtRatio& b) {
    return a.tag_ == b.tag_ && (a.tag_ != Tag::kFinite || a.log_ == b.log_);
  }

 private:
  constexpr ExtRatio(Tag tag, double log_value) : tag_(tag), log_(log_value) {}

  Tag tag_ = Tag::kZero;
  double log_ = 0.0;
};

}  // namespace spindecay
