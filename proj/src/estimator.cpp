#include "foodwise/estimator.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string>

#include "foodwise/error.hpp"

namespace foodwise {

LinearModel fit(std::span<const WeightSample> samples) {
  const auto n = static_cast<std::int64_t>(samples.size());
  if (n < 2) {
    throw Error(Errc::InsufficientSamples,
                "need at least 2 samples, got " + std::to_string(n));
  }

  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& s : samples) {
    mean_x += static_cast<double>(s.area_px);
    mean_y += s.weight_g;
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& s : samples) {
    const double dx = static_cast<double>(s.area_px) - mean_x;
    const double dy = s.weight_g - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }

  const bool all_equal = std::all_of(samples.begin(), samples.end(), [&](const WeightSample& s) {
    return s.area_px == samples.front().area_px;
  });
  if (all_equal || sxx == 0.0) {
    throw Error(Errc::DegenerateX, "all calibration samples have the same area");
  }

  LinearModel model;
  model.slope = sxy / sxx;
  model.intercept = mean_y - model.slope * mean_x;
  model.n_samples = n;

  if (syy == 0.0) {
    model.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (const auto& s : samples) {
      const double r = s.weight_g - (model.slope * static_cast<double>(s.area_px) + model.intercept);
      ss_res += r * r;
    }
    model.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return model;
}

double predict(const LinearModel& model, std::int64_t area_px) noexcept {
  return std::max(0.0, model.slope * static_cast<double>(area_px) + model.intercept);
}

PerCategory<double> apportion_weight(const LinearModel& model,
                                     const PerCategory<std::int64_t>& areas_px) noexcept {
  PerCategory<double> grams{};
  const std::int64_t total = areas_px.sum();
  if (total <= 0) return grams;
  const double weight = predict(model, total);
  for (FoodCategory c : kFoodCategories) {
    grams[c] = weight * static_cast<double>(areas_px[c]) / static_cast<double>(total);
  }
  return grams;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<WeightSample> read_weight_samples(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "area_px,weight_g") {
    throw Error(Errc::MalformedDocument, "calibration CSV must start with 'area_px,weight_g'");
  }
  std::vector<WeightSample> samples;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    const auto where = " on line " + std::to_string(line_no);
    if (comma == std::string_view::npos) throw Error(Errc::MalformedDocument, "expected two columns" + where);
    const std::string_view a = trim(row.substr(0, comma));
    const std::string_view w = trim(row.substr(comma + 1));

    WeightSample s;
    auto [pa, ea] = std::from_chars(a.data(), a.data() + a.size(), s.area_px);
    if (ea != std::errc{} || pa != a.data() + a.size() || s.area_px < 0) {
      throw Error(Errc::MalformedDocument, "area_px must be a non-negative integer" + where);
    }
    try {
      std::size_t used = 0;
      s.weight_g = std::stod(std::string(w), &used);
      if (used != w.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(Errc::MalformedDocument, "weight_g must be a number" + where);
    }
    if (!(s.weight_g >= 0.0)) throw Error(Errc::MalformedDocument, "weight_g must be >= 0" + where);
    samples.push_back(s);
  }
  return samples;
}

std::vector<WeightSample> read_weight_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::NotFound, "cannot open calibration file " + path.string());
  return read_weight_samples(in);
}

}  // namespace foodwise
