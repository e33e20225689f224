#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <vector>

#include "foodwise/domain.hpp"

namespace foodwise {

struct WeightSample {
  std::int64_t area_px = 0;
  double weight_g = 0.0;
};

// Grams of leftover food as an affine function of leftover pixel area.
struct LinearModel {
  double slope = 0.0;      // grams per pixel
  double intercept = 0.0;  // grams
  double r_squared = 1.0;
  std::int64_t n_samples = 2;

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// Ordinary least squares in the centered form.
/// Errors: InsufficientSamples (< 2), DegenerateX (all areas equal).
LinearModel fit(std::span<const WeightSample> samples);

/// Never negative: a raw prediction below zero is clamped.
double predict(const LinearModel& model, std::int64_t area_px) noexcept;

/// Splits the tray weight across categories by area share.
PerCategory<double> apportion_weight(const LinearModel& model,
                                     const PerCategory<std::int64_t>& areas_px) noexcept;

/// CSV with the header line "area_px,weight_g".
std::vector<WeightSample> read_weight_samples(std::istream& in);
std::vector<WeightSample> read_weight_samples(const std::filesystem::path& path);

}  // namespace foodwise
