#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "lmdl/metric.hpp"

namespace testutil {

inline lmdl::PrototypeSet random_prototypes(int dim, int rank, int count, int classes,
                                            std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  lmdl::PrototypeSet ps;
  ps.positions.resize(dim, count);
  for (int s = 0; s < count; ++s) {
    for (int i = 0; i < dim; ++i) ps.positions(i, s) = gauss(rng);
    ps.labels.push_back(s % classes + 1);
    lmdl::FactorMetric fm;
    fm.factor.resize(dim, rank);
    for (int j = 0; j < rank; ++j)
      for (int i = 0; i < dim; ++i) fm.factor(i, j) = gauss(rng);
    ps.metrics.push_back(std::move(fm));
  }
  return ps;
}

inline Eigen::VectorXd random_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x[i] = gauss(rng);
  return x;
}

/// Writes `content` to a fresh file under the system temp directory and
/// removes it on destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& content, const std::string& name = "") {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             ("lmdl_test_" + std::to_string(++counter) + "_" +
              (name.empty() ? "file.csv" : name)))
                .string();
    std::ofstream out(path_);
    out << content;
  }
  ~TempFile() { std::remove(path_.c_str()); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace testutil
