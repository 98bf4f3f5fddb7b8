#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "siftwood/samples.hpp"

namespace siftwood::ml {

struct KernelSpec {
  enum class Kind { Linear, Rbf, Polynomial };

  Kind kind = Kind::Linear;
  double gamma = 1.0;  // rbf: exp(-gamma |a-b|^2)
  int degree = 2;      // polynomial: (a.b + coef0)^degree
  double coef0 = 1.0;

  static KernelSpec linear() { return {}; }
  static KernelSpec rbf(double gamma) { return {Kind::Rbf, gamma, 2, 0.0}; }
  static KernelSpec polynomial(int degree, double coef0 = 1.0) {
    return {Kind::Polynomial, 1.0, degree, coef0};
  }

  void validate() const;
  double operator()(std::span<const double> a, std::span<const double> b) const;
  std::string describe() const;
};

struct SmoOptions {
  double tolerance = 1e-3;  // maximal KKT violation at termination
  std::size_t max_iterations = 10'000'000;
};

/// Dual solution of one binary C-SVC problem. y is +1/-1 per sample.
struct BinarySolution {
  std::vector<double> alpha;
  double rho = 0.0;  // decision(x) = sum alpha_i y_i K(x_i, x) - rho
  std::size_t iterations = 0;
  double kkt_gap = 0.0;  // max violating pair gap at termination
};

/// Sequential minimal optimization with second-order working-set selection.
/// Throws ConvergenceError when the iteration cap is reached first.
BinarySolution smo_solve(std::span<const std::vector<double>> kernel_matrix,
                         std::span<const int> y, double C, const SmoOptions& options = {});

/// Maximal KKT violation (m(alpha) - M(alpha)) of a dual point.
double kkt_gap(std::span<const std::vector<double>> kernel_matrix, std::span<const int> y,
               std::span<const double> alpha, double C);

/// Pairwise machine for classes (positive_class < negative_class).
struct BinaryMachine {
  int positive_class = 0;
  int negative_class = 1;
  std::size_t dim = 0;
  std::vector<double> support_vectors;  // row-major, dim entries each
  std::vector<double> alpha;
  std::vector<int> y;
  double rho = 0.0;
  std::size_t iterations = 0;
  double kkt_gap = 0.0;

  std::size_t support_count() const { return alpha.size(); }
  std::span<const double> support_vector(std::size_t i) const {
    return {support_vectors.data() + i * dim, dim};
  }
  double decision(const KernelSpec& kernel, std::span<const double> x) const;
};

struct SvmModel {
  KernelSpec kernel;
  double C = 1.0;
  int num_classes = 0;
  std::size_t dim = 0;
  std::vector<BinaryMachine> machines;  // (0,1), (0,2), ..., (C-2, C-1)
};

/// One-vs-one training, machines in lexicographic class-pair order.
SvmModel svm_train(const SampleSet& samples, const KernelSpec& kernel, double C,
                   const SmoOptions& options = {});

/// Pairwise vote. Ties go to the largest summed |decision| among the tied
/// classes, then to the lowest class id.
int svm_predict(const SvmModel& model, std::span<const double> query);

}  // namespace siftwood::ml
