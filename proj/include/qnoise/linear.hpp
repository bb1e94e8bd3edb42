// Copyright 2026 The qnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qnoise/errors.hpp"
#include "qnoise/matrix.hpp"

namespace qnoise {

/// Ordinary least squares with intercept: predict(x) = w.x + b. Fitted via
/// the normal equations with ridge 1e-8 added to the Gram diagonal for
/// conditioning, solved by a hand-rolled Cholesky factorization.
class LinearModel {
public:
    static constexpr double kRidge = 1e-8;

    void fit(const Matrix& x, const std::vector<double>& y) {
        if (x.rows == 0 || x.cols == 0 || x.rows != y.size()) {
            throw std::invalid_argument("linreg: empty data or row/label mismatch");
        }
        for (double v : y) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("linreg: non-finite label");
            }
        }
        // Augmented design [X | 1]; Gram = A^T A + ridge I, rhs = A^T y.
        const size_t d = x.cols + 1;
        std::vector<double> gram(d * d, 0.0);
        std::vector<double> rhs(d, 0.0);
        for (size_t r = 0; r < x.rows; ++r) {
            const double* row = x.row(r);
            for (size_t i = 0; i < d; ++i) {
                const double xi = i < x.cols ? row[i] : 1.0;
                rhs[i] += xi * y[r];
                for (size_t j = i; j < d; ++j) {
                    const double xj = j < x.cols ? row[j] : 1.0;
                    gram[i * d + j] += xi * xj;
                }
            }
        }
        for (size_t i = 0; i < d; ++i) {
            gram[i * d + i] += kRidge;
            for (size_t j = 0; j < i; ++j) {
                gram[i * d + j] = gram[j * d + i];
            }
        }
        const std::vector<double> solution = solve_cholesky(gram, rhs, d);
        weights_.assign(solution.begin(), solution.end() - 1);
        intercept_ = solution.back();
        fitted_ = true;
    }

    double predict_one(const double* row) const {
        require_fitted();
        double acc = intercept_;
        for (size_t j = 0; j < weights_.size(); ++j) {
            acc += weights_[j] * row[j];
        }
        return acc;
    }

    std::vector<double> predict(const Matrix& x) const {
        require_fitted();
        if (x.cols != weights_.size()) {
            throw std::invalid_argument("linreg: feature count mismatch");
        }
        std::vector<double> out(x.rows);
        for (size_t r = 0; r < x.rows; ++r) {
            out[r] = predict_one(x.row(r));
        }
        return out;
    }

    size_t parameter_count() const { return weights_.size() + 1; }
    const std::vector<double>& weights() const { return weights_; }
    double intercept() const { return intercept_; }
    bool fitted() const { return fitted_; }

    /// Restores a fitted model from stored parameters (model file loading).
    void restore(std::vector<double> weights, double intercept) {
        weights_ = std::move(weights);
        intercept_ = intercept;
        fitted_ = true;
    }

private:
    void require_fitted() const {
        if (!fitted_) {
            throw std::logic_error("linreg: model is not fitted");
        }
    }

    /// Solves (symmetric positive definite) A x = b via LL^T.
    static std::vector<double> solve_cholesky(std::vector<double> a, std::vector<double> b,
                                              size_t d) {
        for (size_t i = 0; i < d; ++i) {
            for (size_t j = 0; j <= i; ++j) {
                double sum = a[i * d + j];
                for (size_t k = 0; k < j; ++k) {
                    sum -= a[i * d + k] * a[j * d + k];
                }
                if (i == j) {
                    if (sum <= 0.0) {
                        throw NumericError("linreg: Gram matrix not positive definite");
                    }
                    a[i * d + j] = std::sqrt(sum);
                } else {
                    a[i * d + j] = sum / a[j * d + j];
                }
            }
        }
        // Forward substitution L z = b, then backward L^T x = z.
        for (size_t i = 0; i < d; ++i) {
            double sum = b[i];
            for (size_t k = 0; k < i; ++k) {
                sum -= a[i * d + k] * b[k];
            }
            b[i] = sum / a[i * d + i];
        }
        for (size_t ii = d; ii > 0; --ii) {
            const size_t i = ii - 1;
            double sum = b[i];
            for (size_t k = i + 1; k < d; ++k) {
                sum -= a[k * d + i] * b[k];
            }
            b[i] = sum / a[i * d + i];
        }
        return b;
    }

    std::vector<double> weights_;
    double intercept_ = 0.0;
    bool fitted_ = false;
};

}  // namespace qnoise
