#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <sharpiv/data.hpp>

#include "oracles.hpp"

namespace fixtures {

inline sharpiv::IVDataset to_dataset(const std::vector<oracle::Row>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, 1);
  Eigen::VectorXd z(n), a(n), y(n), c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    x(i, 0) = r.level;
    z(i) = r.z;
    a(i) = r.a;
    y(i) = r.y;
    c(i) = r.c;
  }
  return sharpiv::make_dataset(x, z, a, y, c, {"x"});
}

inline std::filesystem::path temp_path(const std::string& name) {
  static std::mt19937_64 rng(std::random_device{}());
  const auto dir = std::filesystem::temp_directory_path() / ("sharpiv_test_" + std::to_string(rng()));
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace fixtures
