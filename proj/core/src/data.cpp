#include "sharpiv/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace sharpiv {

namespace {

bool is_binary(const Eigen::VectorXd& v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return e == 0.0 || e == 1.0; });
}

bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  return m.allFinite();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  cells.push_back(std::move(cell));
  for (auto& c : cells) {
    const auto first = c.find_first_not_of(" \t");
    const auto last = c.find_last_not_of(" \t");
    c = first == std::string::npos ? std::string{} : c.substr(first, last - first + 1);
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") {
    throw ValidationError("missing value in column '" + column + "' at data row " +
                          std::to_string(row));
  }
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ValidationError("non-numeric cell '" + cell + "' in column '" + column +
                          "' at data row " + std::to_string(row));
  }
  return value;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void validate(const IVDataset& ds) {
  const auto n = ds.z.size();
  if (n < 1) throw ValidationError("dataset must contain at least one unit");
  if (ds.a.size() != n || ds.y.size() != n || ds.x.rows() != n) {
    throw ValidationError("schema mismatch: x, z, a, y must have the same number of rows");
  }
  if (ds.latent_c && ds.latent_c->size() != n) {
    throw ValidationError("schema mismatch: latent complier labels have wrong length");
  }
  if (!ds.covariate_names.empty() &&
      static_cast<Eigen::Index>(ds.covariate_names.size()) != ds.x.cols()) {
    throw ValidationError("schema mismatch: covariate names do not match covariate columns");
  }
  if (!is_binary(ds.z)) throw ValidationError("non-binary instrument");
  if (!is_binary(ds.a)) throw ValidationError("non-binary treatment");
  if (ds.latent_c && !is_binary(*ds.latent_c)) {
    throw ValidationError("non-binary latent complier labels");
  }
  if (!all_finite(ds.y)) throw ValidationError("outcome contains non-finite values");
  if (!all_finite(ds.x)) throw ValidationError("covariates contain non-finite values");
}

IVDataset make_dataset(Eigen::MatrixXd x, Eigen::VectorXd z, Eigen::VectorXd a,
                       Eigen::VectorXd y, std::optional<Eigen::VectorXd> latent_c,
                       std::vector<std::string> covariate_names) {
  IVDataset ds{std::move(x), std::move(z), std::move(a), std::move(y),
               std::move(latent_c), std::move(covariate_names)};
  if (ds.covariate_names.empty()) {
    for (Eigen::Index j = 0; j < ds.x.cols(); ++j) {
      ds.covariate_names.push_back("x" + std::to_string(j + 1));
    }
  }
  validate(ds);
  return ds;
}

IVDataset load_csv(const std::filesystem::path& path, const ColumnSpec& spec) {
  std::ifstream in(path);
  if (!in) throw ValidationError("file not found: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty file: " + path.string());
  const auto header = split_csv_line(line);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < header.size(); ++j) index.emplace(header[j], j);

  auto column = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) {
      throw ValidationError("schema mismatch: column '" + name + "' not found");
    }
    return it->second;
  };
  const std::size_t yj = column(spec.y_col);
  const std::size_t aj = column(spec.a_col);
  const std::size_t zj = column(spec.z_col);
  std::vector<std::size_t> xj;
  for (const auto& name : spec.x_cols) xj.push_back(column(name));
  std::optional<std::size_t> cj;
  if (spec.c_col) cj = column(*spec.c_col);

  std::vector<double> ys, as, zs, cs, xs;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ValidationError("schema mismatch: data row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(header.size()));
    }
    ys.push_back(parse_cell(cells[yj], row, spec.y_col));
    as.push_back(parse_cell(cells[aj], row, spec.a_col));
    zs.push_back(parse_cell(cells[zj], row, spec.z_col));
    for (std::size_t k = 0; k < xj.size(); ++k) {
      xs.push_back(parse_cell(cells[xj[k]], row, spec.x_cols[k]));
    }
    if (cj) cs.push_back(parse_cell(cells[*cj], row, *spec.c_col));
  }

  const auto n = static_cast<Eigen::Index>(ys.size());
  const auto p = static_cast<Eigen::Index>(xj.size());
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = xs[static_cast<std::size_t>(i * p + j)];
  }
  auto to_vec = [](const std::vector<double>& v) {
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(),
                                                            static_cast<Eigen::Index>(v.size())));
  };
  std::optional<Eigen::VectorXd> c;
  if (cj) c = to_vec(cs);
  return make_dataset(std::move(x), to_vec(zs), to_vec(as), to_vec(ys), std::move(c),
                      spec.x_cols);
}

void save_csv(const IVDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  std::vector<std::string> names = ds.covariate_names;
  if (names.empty()) {
    for (Eigen::Index j = 0; j < ds.x.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  }
  for (const auto& name : names) out << name << ',';
  out << "z,a,y";
  if (ds.latent_c) out << ",c";
  out << '\n';
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    for (Eigen::Index j = 0; j < ds.x.cols(); ++j) out << format_double(ds.x(i, j)) << ',';
    out << format_double(ds.z(i)) << ',' << format_double(ds.a(i)) << ','
        << format_double(ds.y(i));
    if (ds.latent_c) out << ',' << format_double((*ds.latent_c)(i));
    out << '\n';
  }
}

std::pair<IVDataset, ScaleInfo> rescale_outcome(const IVDataset& ds, Warnings* warnings) {
  if (!ds.y.allFinite()) throw ValidationError("outcome contains non-finite values");
  IVDataset out = ds;
  const double lo = ds.y.minCoeff();
  const double hi = ds.y.maxCoeff();
  if (lo >= 0.0 && hi <= 1.0 && lo < hi) {
    return {std::move(out), ScaleInfo{0.0, 1.0, false}};
  }
  if (lo == hi) {
    if (warnings) {
      warnings->push_back("constant outcome: rescaled outcome set to zero; bounds are degenerate");
    }
    out.y.setZero();
    return {std::move(out), ScaleInfo{lo, hi, true}};
  }
  out.y = (ds.y.array() - lo) / (hi - lo);
  return {std::move(out), ScaleInfo{lo, hi, false}};
}

std::vector<Eigen::Index> FoldAssignment::members(int fold) const {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] == fold) idx.push_back(static_cast<Eigen::Index>(i));
  }
  return idx;
}

std::vector<Eigen::Index> FoldAssignment::complement(int fold) const {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] != fold) idx.push_back(static_cast<Eigen::Index>(i));
  }
  return idx;
}

FoldAssignment assign_folds(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2 || static_cast<std::size_t>(k) > n) {
    throw ValidationError("fold count must satisfy 2 <= k <= n");
  }
  FoldAssignment folds{std::vector<int>(n), k, seed};
  for (std::uint64_t attempt = seed;; ++attempt) {
    std::mt19937_64 rng(attempt);
    std::uniform_int_distribution<int> draw(1, k);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (auto& bi : folds.b) {
      bi = draw(rng);
      ++counts[static_cast<std::size_t>(bi - 1)];
    }
    if (std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; })) break;
  }
  return folds;
}

FoldAssignment single_fold(std::size_t n) {
  return FoldAssignment{std::vector<int>(n, 1), 1, 0};
}

}  // namespace sharpiv
