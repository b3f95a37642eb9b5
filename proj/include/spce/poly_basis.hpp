#pragma once

#include <vector>

#include <Eigen/Dense>

#include "spce/input_model.hpp"
#include "spce/multi_index.hpp"

namespace spce {

enum class BasisFamily { Legendre, Hermite };

/// One basis family per input dimension: Legendre for uniform marginals,
/// Hermite for everything standardized to the standard normal.
std::vector<BasisFamily> families_for(const InputModel& model);

/// Orthonormal univariate polynomial value psi_k(u) via the three-term
/// recurrence on the normalized family. Legendre is orthonormal for
/// U(-1,1), Hermite (probabilists', scaled by 1/sqrt(k!)) for N(0,1).
double eval_univariate(BasisFamily family, int k, double u);

/// Fills out[0..kmax] with psi_0(u) .. psi_kmax(u).
void eval_univariate_all(BasisFamily family, int kmax, double u, double* out);

/// Tensor-product value prod_i psi_{alpha_i}(u_i).
double eval_multivariate(const std::vector<BasisFamily>& families, const MultiIndex& alpha,
                         const Vec& u);

/// Regression matrix Psi with Psi(i,j) = psi_{alpha_j}(u_i), rows matching
/// the rows of U (standardized points), columns matching the canonical order
/// of `set`. Univariate values are cached per row up to the maximal degree
/// each dimension needs.
Mat build_regression_matrix(const MultiIndexSet& set, const std::vector<BasisFamily>& families,
                            const Mat& U);

/// Same, restricted to the columns listed in `cols` (positions into `set`).
Mat build_regression_matrix_cols(const MultiIndexSet& set,
                                 const std::vector<BasisFamily>& families, const Mat& U,
                                 const std::vector<int>& cols);

}  // namespace spce
