#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xfrisk/error.hpp"

namespace xfrisk {

inline constexpr std::size_t kHoursPerDay = 24;
inline constexpr std::size_t kDaysPerYear = 365;
inline constexpr std::size_t kHoursPerYear = kHoursPerDay * kDaysPerYear;  // 8760
inline constexpr double kZeroCelsiusK = 273.15;

/// Fixed-step (1 h) real-valued series starting at 00:00 of `epoch`.
/// Length is always a positive multiple of 24.
class HourlyTimeSeries {
 public:
  HourlyTimeSeries() = default;

  HourlyTimeSeries(std::chrono::sys_days epoch, std::vector<double> values)
      : epoch_(epoch), values_(std::move(values)) {
    if (values_.empty() || values_.size() % kHoursPerDay != 0) {
      fail(ErrorKind::Structural, "hourly series length " + std::to_string(values_.size()) +
                                      " is not a positive multiple of 24");
    }
  }

  static HourlyTimeSeries zeros(std::chrono::sys_days epoch, std::size_t hours) {
    return HourlyTimeSeries(epoch, std::vector<double>(hours, 0.0));
  }

  static HourlyTimeSeries constant(std::chrono::sys_days epoch, std::size_t hours, double value) {
    return HourlyTimeSeries(epoch, std::vector<double>(hours, value));
  }

  std::chrono::sys_days epoch() const noexcept { return epoch_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::size_t days() const noexcept { return values_.size() / kHoursPerDay; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  bool aligned_with(const HourlyTimeSeries& other) const noexcept {
    return epoch_ == other.epoch_ && values_.size() == other.values_.size();
  }

  HourlyTimeSeries& operator+=(const HourlyTimeSeries& rhs) {
    require_aligned(rhs, "series addition");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
    return *this;
  }

  friend HourlyTimeSeries operator+(HourlyTimeSeries lhs, const HourlyTimeSeries& rhs) {
    lhs += rhs;
    return lhs;
  }

  void require_aligned(const HourlyTimeSeries& other, const std::string& context) const {
    if (values_.size() != other.values_.size()) {
      fail(ErrorKind::Structural, context + ": series lengths differ (" +
                                      std::to_string(values_.size()) + " vs " +
                                      std::to_string(other.values_.size()) + ")");
    }
    if (epoch_ != other.epoch_) fail(ErrorKind::Structural, context + ": series epochs differ");
  }

  double mean() const noexcept {
    double sum = 0.0;
    for (double v : values_) sum += v;
    return values_.empty() ? 0.0 : sum / static_cast<double>(values_.size());
  }

  bool operator==(const HourlyTimeSeries&) const = default;

 private:
  std::chrono::sys_days epoch_{};
  std::vector<double> values_;
};

inline void require_nonnegative(const HourlyTimeSeries& series, const std::string& what) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!(series[i] >= 0.0) || !std::isfinite(series[i])) {
      fail(ErrorKind::Data, what + ": load at hour " + std::to_string(i) +
                                " is negative or not finite");
    }
  }
}

inline void require_finite(const HourlyTimeSeries& series, const std::string& what) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!std::isfinite(series[i])) {
      fail(ErrorKind::Data, what + ": value at hour " + std::to_string(i) + " is not finite");
    }
  }
}

// Canonical 365-day calendar. February 29 never appears; a leap base year
// is folded onto this calendar at ingestion.

inline constexpr std::array<unsigned, 12> kCanonicalMonthDays{31, 28, 31, 30, 31, 30,
                                                              31, 31, 30, 31, 30, 31};

/// Month (1..12) of a day index in the canonical year.
constexpr unsigned canonical_month_of_day(std::size_t day_of_year) noexcept {
  std::size_t d = day_of_year % kDaysPerYear;
  for (unsigned m = 0; m < 12; ++m) {
    if (d < kCanonicalMonthDays[m]) return m + 1;
    d -= kCanonicalMonthDays[m];
  }
  return 12;
}

constexpr unsigned canonical_month_of_hour(std::size_t hour_of_year) noexcept {
  return canonical_month_of_day(hour_of_year / kHoursPerDay);
}

/// Canonical day index (0..364) of a calendar date, or -1 for February 29.
inline int canonical_day_of_year(std::chrono::year_month_day date) noexcept {
  using namespace std::chrono;
  const unsigned m = static_cast<unsigned>(date.month());
  const unsigned d = static_cast<unsigned>(date.day());
  if (m == 2 && d == 29) return -1;
  int day = 0;
  for (unsigned i = 0; i + 1 < m; ++i) day += static_cast<int>(kCanonicalMonthDays[i]);
  return day + static_cast<int>(d) - 1;
}

inline std::chrono::sys_days year_start(int year) {
  using namespace std::chrono;
  return sys_days{std::chrono::year{year} / January / 1};
}

}  // namespace xfrisk
