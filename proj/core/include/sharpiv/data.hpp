#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sharpiv/error.hpp"

namespace sharpiv {

/// Observed IV sample O = (X, Z, A, Y), plus latent complier labels when
/// the data came from a simulator.
///
/// Construct through make_dataset() or load_csv(); both validate. Treat as
/// immutable afterwards so it can be shared read-only across workers.
struct IVDataset {
  Eigen::MatrixXd x;  ///< n x p covariates
  Eigen::VectorXd z;  ///< instrument, 0/1
  Eigen::VectorXd a;  ///< treatment, 0/1
  Eigen::VectorXd y;  ///< outcome
  std::optional<Eigen::VectorXd> latent_c;
  std::vector<std::string> covariate_names;

  [[nodiscard]] Eigen::Index size() const { return z.size(); }
  [[nodiscard]] Eigen::Index num_covariates() const { return x.cols(); }
};

/// Checks shapes, binary z/a, finite values. Throws ValidationError.
void validate(const IVDataset& ds);

IVDataset make_dataset(Eigen::MatrixXd x, Eigen::VectorXd z, Eigen::VectorXd a,
                       Eigen::VectorXd y,
                       std::optional<Eigen::VectorXd> latent_c = std::nullopt,
                       std::vector<std::string> covariate_names = {});

struct ColumnSpec {
  std::string y_col = "y";
  std::string a_col = "a";
  std::string z_col = "z";
  std::vector<std::string> x_cols;
  /// Optional latent complier column (simulation output only).
  std::optional<std::string> c_col;
};

/// Reads a header-row CSV. Missing or non-numeric cells are rejected.
IVDataset load_csv(const std::filesystem::path& path, const ColumnSpec& spec);

/// Writes x columns, then z, a, y and (if present) c, at round-trip precision.
void save_csv(const IVDataset& ds, const std::filesystem::path& path);

/// Affine map between the original outcome scale and [0,1].
struct ScaleInfo {
  double y_min = 0.0;
  double y_max = 1.0;
  bool degenerate = false;  ///< constant outcome; rescaled y is all zero

  [[nodiscard]] double range() const { return y_max - y_min; }
  /// Outcome level on the original scale.
  [[nodiscard]] double to_original_level(double v) const { return y_min + v * range(); }
  /// Effect (difference of levels) on the original scale.
  [[nodiscard]] double to_original_effect(double v) const { return v * range(); }
};

/// Rescales y into [0,1]. Data already inside [0,1] is left untouched with
/// ScaleInfo (0, 1). Constant y yields a degenerate ScaleInfo and a warning.
std::pair<IVDataset, ScaleInfo> rescale_outcome(const IVDataset& ds,
                                                Warnings* warnings = nullptr);

/// Fold labels B_i in {1..k}.
struct FoldAssignment {
  std::vector<int> b;
  int k = 0;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t size() const { return b.size(); }
  /// Indices i with B_i == fold.
  [[nodiscard]] std::vector<Eigen::Index> members(int fold) const;
  /// Indices i with B_i != fold.
  [[nodiscard]] std::vector<Eigen::Index> complement(int fold) const;
};

/// Draws each B_i uniformly from {1..k}; redraws with seed+1, seed+2, ...
/// until no fold is empty.
FoldAssignment assign_folds(std::size_t n, int k, std::uint64_t seed);

/// A single fold containing every unit; used for in-sample fits.
FoldAssignment single_fold(std::size_t n);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace sharpiv
