#include "foodwise/domain.hpp"

#include <algorithm>
#include <cctype>

#include "foodwise/error.hpp"

namespace foodwise {

std::string_view to_string(FoodCategory c) noexcept {
  switch (c) {
    case FoodCategory::rice: return "rice";
    case FoodCategory::meat: return "meat";
    case FoodCategory::vegetables: return "vegetables";
  }
  return "?";
}

std::optional<FoodCategory> parse_food_category(std::string_view name) noexcept {
  for (FoodCategory c : kFoodCategories) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

CompletionScores CompletionScores::of(const PerCategory<int>& percent) {
  for (FoodCategory c : kFoodCategories) {
    if (percent[c] < kMinScore || percent[c] > kMaxScore) {
      throw Error(Errc::OutOfRange,
                  std::string(to_string(c)) + " score " + std::to_string(percent[c]) +
                      " is outside [0, 100]",
                  std::string(to_string(c)));
    }
  }
  return CompletionScores(percent);
}

CompletionScores CompletionScores::of(int rice, int meat, int vegetables) {
  return of(PerCategory<int>{{rice, meat, vegetables}});
}

CompletionScores validate_scores(const RawScores& raw) {
  for (const auto& [key, value] : raw) {
    if (!parse_food_category(key)) {
      throw Error(Errc::UnknownCategory, "unknown food category '" + key + "'", key);
    }
  }
  PerCategory<int> percent{};
  for (FoodCategory c : kFoodCategories) {
    const auto it = raw.find(to_string(c));
    if (it == raw.end()) {
      throw Error(Errc::MissingCategory, "missing score for " + std::string(to_string(c)),
                  std::string(to_string(c)));
    }
    if (it->second < kMinScore || it->second > kMaxScore) {
      throw Error(Errc::OutOfRange,
                  std::string(to_string(c)) + " score " + std::to_string(it->second) +
                      " is outside [0, 100]",
                  std::string(to_string(c)));
    }
    percent[c] = static_cast<int>(it->second);
  }
  return CompletionScores::of(percent);
}

double overall_completion(const CompletionScores& s) noexcept {
  return static_cast<double>(s.total()) / 3.0;
}

std::string normalize_email(std::string_view email) {
  auto first = std::find_if_not(email.begin(), email.end(),
                                [](unsigned char ch) { return std::isspace(ch); });
  auto last = std::find_if_not(email.rbegin(), email.rend(),
                               [](unsigned char ch) { return std::isspace(ch); }).base();
  std::string out;
  if (first < last) out.assign(first, last);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

}  // namespace foodwise
