#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "nlsv/grid_field.hpp"

namespace testing {

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("nlsv_tests_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// A exp(-|x - c|^2 / w^2) e^{i k.x}
inline nlsv::Field gaussian(const nlsv::Grid& g, double amplitude, double width, nlsv::Vec3 c = {},
                            nlsv::Vec3 k = {}) {
  return nlsv::Field::from_function(g, [&](const nlsv::Vec3& x) {
    const nlsv::Vec3 r = x - c;
    return amplitude * std::exp(-nlsv::dot(r, r) / (width * width)) * std::exp(nlsv::Complex(0.0, nlsv::dot(k, x)));
  });
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace testing
