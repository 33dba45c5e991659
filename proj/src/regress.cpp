#include "hysid/regress.hpp"

#include <algorithm>
#include <cmath>

#include "hysid/kernels.hpp"

namespace hysid {

namespace {

// Two columns are treated as the same feature when their normalized values
// agree to this absolute tolerance (e.g. w and |w| on a non-negative output).
constexpr double kDuplicateColumnTolerance = 1e-12;

void check_shape(Eigen::Index rows, Eigen::Index cols, std::size_t target_len) {
    if (static_cast<std::size_t>(rows) != target_len) {
        throw Error(ErrorCode::ShapeMismatch, "library rows (" + std::to_string(rows) +
                                                  ") differ from target length (" +
                                                  std::to_string(target_len) + ")");
    }
    if (rows < cols) {
        throw Error(ErrorCode::ShapeMismatch, "library needs at least as many rows as columns");
    }
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd solve_least_squares(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                    const Eigen::Ref<const Eigen::VectorXd>& b) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    return cod.solve(b);
}

Eigen::VectorXd solve_ridge(const Eigen::Ref<const Eigen::MatrixXd>& a,
                            const Eigen::Ref<const Eigen::VectorXd>& b, double penalty) {
    if (penalty == 0.0) return solve_least_squares(a, b);
    const Eigen::Index n = a.rows();
    const Eigen::Index m = a.cols();
    Eigen::MatrixXd augmented(n + m, m);
    augmented.topRows(n) = a;
    augmented.bottomRows(m) = std::sqrt(penalty) * Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
    rhs.head(n) = b;
    return solve_least_squares(augmented, rhs);
}

}  // namespace

std::vector<double> ols(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                        std::span<const double> target) {
    check_shape(theta.rows(), theta.cols(), target.size());
    Eigen::Map<const Eigen::VectorXd> b(target.data(), static_cast<Eigen::Index>(target.size()));
    return to_vector(solve_least_squares(theta, b));
}

std::vector<double> ols(const LibraryMatrix& theta, std::span<const double> target) {
    return ols(theta.values, target);
}

std::vector<double> ridge(const Eigen::Ref<const Eigen::MatrixXd>& theta,
                          std::span<const double> target, double penalty) {
    if (!(penalty >= 0.0) || !std::isfinite(penalty)) {
        throw Error(ErrorCode::InvalidParameter, "ridge penalty must be >= 0");
    }
    check_shape(theta.rows(), theta.cols(), target.size());
    Eigen::Map<const Eigen::VectorXd> b(target.data(), static_cast<Eigen::Index>(target.size()));
    return to_vector(solve_ridge(theta, b, penalty));
}

std::vector<double> ridge(const LibraryMatrix& theta, std::span<const double> target,
                          double penalty) {
    return ridge(theta.values, target, penalty);
}

void validate(const StlsqConfig& cfg) {
    if (!(cfg.threshold >= 0.0) || !std::isfinite(cfg.threshold)) {
        throw Error(ErrorCode::InvalidParameter, "threshold must be >= 0");
    }
    if (cfg.max_sweeps < 1) throw Error(ErrorCode::InvalidParameter, "max_sweeps must be >= 1");
    if (!(cfg.ridge_penalty >= 0.0) || !std::isfinite(cfg.ridge_penalty)) {
        throw Error(ErrorCode::InvalidParameter, "ridge_penalty must be >= 0");
    }
}

namespace {

struct PreparedLibrary {
    Eigen::MatrixXd scaled;
    std::vector<double> norms;
    std::vector<bool> eligible;
};

PreparedLibrary prepare(const LibraryMatrix& theta, bool normalize) {
    const auto& k = kernels::active();
    const std::size_t n = theta.rows();
    const std::size_t m = theta.cols();
    PreparedLibrary p{theta.values, std::vector<double>(m, 1.0), std::vector<bool>(m, true)};

    for (std::size_t j = 0; j < m; ++j) {
        std::span<double> col(p.scaled.col(static_cast<Eigen::Index>(j)).data(), n);
        const double norm = std::sqrt(k.dot(col, col));
        if (norm == 0.0) {
            p.eligible[j] = false;
            continue;
        }
        if (normalize) {
            p.norms[j] = norm;
            k.scale(col, 1.0 / norm);
        }
    }
    if (!normalize) return p;

    for (std::size_t j = 0; j < m; ++j) {
        if (!p.eligible[j]) continue;
        const auto cj = p.scaled.col(static_cast<Eigen::Index>(j));
        for (std::size_t i = 0; i < j; ++i) {
            if (!p.eligible[i]) continue;
            const auto ci = p.scaled.col(static_cast<Eigen::Index>(i));
            if ((cj - ci).cwiseAbs().maxCoeff() <= kDuplicateColumnTolerance) {
                p.eligible[j] = false;
                break;
            }
        }
    }
    return p;
}

// Fits on the active columns; inactive coefficients are exactly zero.
std::vector<double> fit_support(const PreparedLibrary& p, const std::vector<bool>& active,
                                const Eigen::Map<const Eigen::VectorXd>& b, double penalty) {
    std::vector<Eigen::Index> cols;
    for (std::size_t j = 0; j < active.size(); ++j) {
        if (active[j]) cols.push_back(static_cast<Eigen::Index>(j));
    }
    std::vector<double> coef(active.size(), 0.0);
    if (cols.empty()) return coef;

    Eigen::MatrixXd sub(p.scaled.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        sub.col(static_cast<Eigen::Index>(c)) = p.scaled.col(cols[c]);
    }
    const Eigen::VectorXd x = solve_ridge(sub, b, penalty);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto j = static_cast<std::size_t>(cols[c]);
        coef[j] = x[static_cast<Eigen::Index>(c)] / p.norms[j];
    }
    return coef;
}

std::vector<bool> threshold_support(const std::vector<bool>& active, const std::vector<double>& coef,
                                    double threshold) {
    std::vector<bool> next(active.size(), false);
    for (std::size_t j = 0; j < active.size(); ++j) {
        next[j] = active[j] && !(std::abs(coef[j]) < threshold);
    }
    return next;
}

std::size_t count(const std::vector<bool>& v) {
    return static_cast<std::size_t>(std::count(v.begin(), v.end(), true));
}

}  // namespace

SparseModel stlsq(const LibraryMatrix& theta, std::span<const double> target,
                  const StlsqConfig& cfg, StlsqTrace* trace) {
    validate(cfg);
    check_shape(theta.values.rows(), theta.values.cols(), target.size());
    if (theta.terms.size() != theta.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "library term count differs from column count");
    }
    Eigen::Map<const Eigen::VectorXd> b(target.data(), static_cast<Eigen::Index>(target.size()));

    const PreparedLibrary prepared = prepare(theta, cfg.normalize_columns);
    std::vector<bool> active = prepared.eligible;
    if (trace) {
        trace->support_sizes.clear();
        trace->excluded_columns.clear();
        for (std::size_t j = 0; j < active.size(); ++j) {
            if (!active[j]) trace->excluded_columns.push_back(j);
        }
    }

    std::vector<double> coef = fit_support(prepared, active, b, cfg.ridge_penalty);
    if (trace) trace->support_sizes.push_back(count(active));

    SparseModel model;
    model.terms = theta.terms;
    model.threshold = cfg.threshold;
    model.converged = false;
    model.iterations = cfg.max_sweeps;

    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        std::vector<bool> next = threshold_support(active, coef, cfg.threshold);
        if (next == active) {
            model.converged = true;
            model.iterations = sweep;
            break;
        }
        active = std::move(next);
        coef = fit_support(prepared, active, b, cfg.ridge_penalty);
        if (trace) trace->support_sizes.push_back(count(active));
        if (count(active) == 0) {
            model.converged = true;
            model.iterations = sweep;
            break;
        }
    }
    for (std::size_t j = 0; j < coef.size(); ++j) {
        if (!active[j]) coef[j] = 0.0;
    }
    model.coefficients = std::move(coef);
    return model;
}

bool is_support_fixed_point(const SparseModel& model, const LibraryMatrix& theta,
                            std::span<const double> target, const StlsqConfig& cfg) {
    check_shape(theta.values.rows(), theta.values.cols(), target.size());
    Eigen::Map<const Eigen::VectorXd> b(target.data(), static_cast<Eigen::Index>(target.size()));
    const PreparedLibrary prepared = prepare(theta, cfg.normalize_columns);
    std::vector<bool> active(model.coefficients.size());
    for (std::size_t j = 0; j < active.size(); ++j) active[j] = model.coefficients[j] != 0.0;
    const auto coef = fit_support(prepared, active, b, cfg.ridge_penalty);
    return threshold_support(active, coef, cfg.threshold) == active;
}

}  // namespace hysid
