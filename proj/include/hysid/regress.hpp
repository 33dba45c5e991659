#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "hysid/core.hpp"

namespace hysid {

/// Least-squares minimizer of ||theta*xi - target||_2 via complete orthogonal
/// decomposition; minimum-norm on rank-deficient input. Throws ShapeMismatch
/// when rows differ from target length or rows < cols.
std::vector<double> ols(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                        std::span<const double> target);
std::vector<double> ols(const LibraryMatrix& theta, std::span<const double> target);

/// Minimizer of ||theta*xi - target||^2 + penalty*||xi||^2, solved as an
/// augmented least-squares problem. penalty == 0 defers to ols.
std::vector<double> ridge(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                          std::span<const double> target, double penalty);
std::vector<double> ridge(const LibraryMatrix& theta, std::span<const double> target,
                          double penalty);

struct StlsqConfig {
    double threshold = 0.1;
    int max_sweeps = 10;
    /// Applied to the column-normalized coefficients when normalize_columns is set.
    double ridge_penalty = 0.0;
    bool normalize_columns = true;
};

void validate(const StlsqConfig& cfg);

/// Support size after the initial fit and after every threshold sweep.
struct StlsqTrace {
    std::vector<std::size_t> support_sizes;
    /// Columns dropped before fitting: zero norm, or identical (after
    /// normalization) to an earlier column.
    std::vector<std::size_t> excluded_columns;
};

/// Sequentially thresholded least squares. Coefficients with magnitude
/// strictly below the threshold (in original units) are zeroed and the rest
/// refit until the support stops changing or max_sweeps is reached; the
/// latter leaves `converged` false rather than throwing.
SparseModel stlsq(const LibraryMatrix& theta, std::span<const double> target,
                  const StlsqConfig& cfg, StlsqTrace* trace = nullptr);

/// One more refit-and-threshold pass on the model's support leaves it unchanged.
bool is_support_fixed_point(const SparseModel& model, const LibraryMatrix& theta,
                            std::span<const double> target, const StlsqConfig& cfg);

}  // namespace hysid
