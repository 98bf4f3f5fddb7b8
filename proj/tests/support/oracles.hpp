#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <tuple>
#include <vector>

#include "siftwood/image.hpp"
#include "siftwood/sift.hpp"

// Reference implementations written independently of the library. They favour
// directness over speed and share no code with core/.
namespace oracle {

/// exp(-x^2 / 2 sigma^2) for |x| <= ceil(4 sigma), normalized to sum 1.
std::vector<double> gaussian_1d(double sigma);

/// Dense 2-D convolution with the outer-product kernel, clamp-to-border.
std::vector<double> dense_blur(const siftwood::Plane& img, double sigma);

/// Every (octave, level, x, y) whose value is strictly above or strictly below
/// all 26 neighbours, by explicit enumeration of the 3x3x3 cube.
std::vector<std::array<int, 4>> scan_extrema(const siftwood::sift::ScalePyramid& dog);

/// Minimum WCSS over every assignment of the points to k labels (all k used).
double optimal_wcss_1d(const std::vector<double>& points, std::size_t k);

/// Probability that k-means++ picks each point as the second centre given the
/// first: D(x)^2 / sum D^2.
std::vector<double> second_centre_probabilities(const std::vector<std::vector<double>>& points,
                                                std::size_t first);

/// Central differences of f at x with step h.
std::vector<double> central_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> x, double h);

/// LBP code by writing out the eight comparisons in clockwise order.
int lbp_code(const siftwood::GrayImage& img, int x, int y);

/// Symmetric unit-mass co-occurrence matrix by direct pair counting.
std::vector<double> glcm(const siftwood::GrayImage& img, int dx, int dy, int levels);

/// Majority vote of the k nearest rows (ties: nearer neighbour's label).
int knn_vote(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
             const std::vector<double>& q, std::size_t k);

}  // namespace oracle
