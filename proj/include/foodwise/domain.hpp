#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "foodwise/enum_array.hpp"
#include "foodwise/time.hpp"

namespace foodwise {

enum class FoodCategory : std::uint8_t { rice, meat, vegetables };

inline constexpr std::array<FoodCategory, 3> kFoodCategories{
    FoodCategory::rice, FoodCategory::meat, FoodCategory::vegetables};

std::string_view to_string(FoodCategory c) noexcept;
std::optional<FoodCategory> parse_food_category(std::string_view name) noexcept;

template <typename T>
using PerCategory = EnumArray<FoodCategory, T, 3>;

inline constexpr int kMinScore = 0;
inline constexpr int kMaxScore = 100;

// Self-reported percent eaten per category. Can only be built with every
// value in [0, 100].
class CompletionScores {
 public:
  /// Throws Error(OutOfRange) naming the first offending category.
  static CompletionScores of(int rice, int meat, int vegetables);
  static CompletionScores of(const PerCategory<int>& percent);

  int operator[](FoodCategory c) const { return percent_[c]; }
  const PerCategory<int>& percent() const noexcept { return percent_; }
  int total() const noexcept { return percent_.sum(); }

  friend bool operator==(const CompletionScores&, const CompletionScores&) = default;

 private:
  explicit CompletionScores(const PerCategory<int>& p) : percent_(p) {}
  PerCategory<int> percent_;
};

using RawScores = std::map<std::string, std::int64_t, std::less<>>;

/// Accepts exactly the three category keys, each in [0, 100].
/// Errors: MissingCategory, UnknownCategory, OutOfRange.
CompletionScores validate_scores(const RawScores& raw);

/// Equal-weight mean of the three category scores.
double overall_completion(const CompletionScores& s) noexcept;

struct User {
  std::string user_id;
  std::string email;
  std::string display_name;
  std::string password_hash;
  Timestamp registered_at{};

  friend bool operator==(const User&, const User&) = default;
};

/// Lowercased, surrounding whitespace removed.
std::string normalize_email(std::string_view email);

struct MealRecord {
  std::string record_id;
  std::string user_id;
  Timestamp submitted_at{};
  Date local_date{};
  CompletionScores scores = CompletionScores::of(0, 0, 0);
  std::string photo_ref;

  double overall() const noexcept { return overall_completion(scores); }

  friend bool operator==(const MealRecord&, const MealRecord&) = default;
};

}  // namespace foodwise
