#include "siftwood/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "siftwood/errors.hpp"

namespace siftwood::ml {
namespace {

constexpr double kTau = 1e-12;

bool in_up(int y, double a, double C) { return (y > 0 && a < C) || (y < 0 && a > 0.0); }
bool in_low(int y, double a, double C) { return (y > 0 && a > 0.0) || (y < 0 && a < C); }

}  // namespace

void KernelSpec::validate() const {
  switch (kind) {
    case Kind::Linear:
      return;
    case Kind::Rbf:
      if (!(gamma > 0.0)) throw InvalidArgument("rbf kernel requires gamma > 0");
      return;
    case Kind::Polynomial:
      if (degree != 2 && degree != 3)
        throw InvalidArgument("polynomial kernel degree must be 2 or 3");
      return;
  }
}

double KernelSpec::operator()(std::span<const double> a, std::span<const double> b) const {
  switch (kind) {
    case Kind::Linear: {
      double dot = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
      return dot;
    }
    case Kind::Rbf: {
      double d2 = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
      }
      return std::exp(-gamma * d2);
    }
    case Kind::Polynomial: {
      double dot = coef0;
      for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
      return degree == 2 ? dot * dot : dot * dot * dot;
    }
  }
  return 0.0;
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Linear:
      os << "linear";
      break;
    case Kind::Rbf:
      os << "rbf(gamma=" << gamma << ")";
      break;
    case Kind::Polynomial:
      os << "poly(degree=" << degree << ",coef0=" << coef0 << ")";
      break;
  }
  return os.str();
}

double kkt_gap(std::span<const std::vector<double>> K, std::span<const int> y,
               std::span<const double> alpha, double C) {
  const std::size_t n = y.size();
  double up = -std::numeric_limits<double>::infinity();
  double low = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    double grad = -1.0;  // (Q alpha - e)_t
    for (std::size_t s = 0; s < n; ++s)
      if (alpha[s] != 0.0) grad += y[t] * y[s] * K[t][s] * alpha[s];
    const double score = -y[t] * grad;
    if (in_up(y[t], alpha[t], C)) up = std::max(up, score);
    if (in_low(y[t], alpha[t], C)) low = std::min(low, score);
  }
  if (up == -std::numeric_limits<double>::infinity() ||
      low == std::numeric_limits<double>::infinity())
    return 0.0;
  return std::max(0.0, up - low);
}

BinarySolution smo_solve(std::span<const std::vector<double>> K, std::span<const int> y,
                         double C, const SmoOptions& options) {
  const std::size_t n = y.size();
  if (K.size() != n) throw InvalidArgument("smo_solve: kernel matrix size mismatch");
  if (!(C > 0.0)) throw InvalidArgument("smo_solve: C must be > 0");

  BinarySolution sol;
  sol.alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);
  auto& alpha = sol.alpha;
  auto q = [&](std::size_t a, std::size_t b) { return y[a] * y[b] * K[a][b]; };

  for (;;) {
    // Working-set selection (second-order, Fan, Chen and Lin 2005).
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t)
      if (in_up(y[t], alpha[t], C) && -y[t] * grad[t] >= gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::size_t j = n;
    double best_obj = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(y[t], alpha[t], C)) continue;
      const double score = y[t] * grad[t];
      gmax2 = std::max(gmax2, score);
      if (i == n) continue;
      const double b = gmax + score;
      if (b <= 0.0) continue;
      double a = K[i][i] + K[t][t] - 2.0 * K[i][t];
      if (a <= 0.0) a = kTau;
      const double obj = -(b * b) / a;
      if (obj <= best_obj) {
        best_obj = obj;
        j = t;
      }
    }
    sol.kkt_gap = std::max(0.0, gmax + gmax2);
    if (i == n || j == n || gmax + gmax2 < options.tolerance) break;
    if (sol.iterations >= options.max_iterations) {
      std::ostringstream os;
      os << "SMO did not converge after " << sol.iterations
         << " iterations (KKT gap " << (gmax + gmax2) << ", tolerance " << options.tolerance
         << ", n=" << n << ", C=" << C << ")";
      throw ConvergenceError(os.str());
    }
    ++sol.iterations;

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = K[i][i] + K[j][j] + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = K[i][i] + K[j][j] - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) grad[t] += q(t, i) * di + q(t, j) * dj;
  }

  // Offset: average over free vectors, midpoint of the feasible interval otherwise.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  sol.rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);
  return sol;
}

double BinaryMachine::decision(const KernelSpec& kernel, std::span<const double> x) const {
  double f = -rho;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    f += alpha[i] * y[i] * kernel(support_vector(i), x);
  return f;
}

SvmModel svm_train(const SampleSet& samples, const KernelSpec& kernel, double C,
                   const SmoOptions& options) {
  kernel.validate();
  if (!(C > 0.0)) throw InvalidArgument("svm_train: C must be > 0");
  if (samples.present_classes() < 2)
    throw InvalidArgument("svm_train: need samples from at least two classes");

  SvmModel model;
  model.kernel = kernel;
  model.C = C;
  model.num_classes = samples.num_classes();
  model.dim = samples.dim();

  std::vector<std::vector<std::size_t>> by_class(samples.num_classes());
  for (std::size_t i = 0; i < samples.size(); ++i) by_class[samples.label(i)].push_back(i);

  for (int a = 0; a < samples.num_classes(); ++a) {
    for (int b = a + 1; b < samples.num_classes(); ++b) {
      BinaryMachine m;
      m.positive_class = a;
      m.negative_class = b;
      m.dim = samples.dim();
      std::vector<std::size_t> idx = by_class[a];
      idx.insert(idx.end(), by_class[b].begin(), by_class[b].end());
      std::vector<int> y(idx.size());
      for (std::size_t t = 0; t < idx.size(); ++t) y[t] = samples.label(idx[t]) == a ? 1 : -1;

      // Classes absent from the training set yield a machine with no support
      // vectors that always votes for the present class via its offset.
      if (by_class[a].empty() || by_class[b].empty()) {
        m.rho = by_class[a].empty() ? 1.0 : -1.0;
        model.machines.push_back(std::move(m));
        continue;
      }

      std::vector<std::vector<double>> K(idx.size(), std::vector<double>(idx.size()));
      for (std::size_t s = 0; s < idx.size(); ++s)
        for (std::size_t t = s; t < idx.size(); ++t)
          K[s][t] = K[t][s] = kernel(samples.row(idx[s]), samples.row(idx[t]));

      const BinarySolution sol = smo_solve(K, y, C, options);
      m.rho = sol.rho;
      m.iterations = sol.iterations;
      m.kkt_gap = sol.kkt_gap;
      for (std::size_t t = 0; t < idx.size(); ++t) {
        if (sol.alpha[t] <= 0.0) continue;
        const auto row = samples.row(idx[t]);
        m.support_vectors.insert(m.support_vectors.end(), row.begin(), row.end());
        m.alpha.push_back(sol.alpha[t]);
        m.y.push_back(y[t]);
      }
      model.machines.push_back(std::move(m));
    }
  }
  return model;
}

int svm_predict(const SvmModel& model, std::span<const double> query) {
  if (query.size() != model.dim)
    throw InvalidArgument("svm_predict: query length " + std::to_string(query.size()) +
                          " does not match " + std::to_string(model.dim));
  std::vector<int> votes(model.num_classes, 0);
  std::vector<double> strength(model.num_classes, 0.0);
  for (const BinaryMachine& m : model.machines) {
    const double f = m.decision(model.kernel, query);
    const int winner = f >= 0.0 ? m.positive_class : m.negative_class;
    ++votes[winner];
    strength[winner] += std::abs(f);
  }
  int best = 0;
  for (int c = 1; c < model.num_classes; ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && strength[c] > strength[best]))
      best = c;
  }
  return best;
}

}  // namespace siftwood::ml
