// satforge/backend/eigen.hpp
//
// Copyright 2026  The SATForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

#include "satforge/matrix.hpp"

namespace satforge::backend {

using DMatrix = Mat<double>;

struct SymEig {
  std::vector<double> values;  // descending
  DMatrix vectors;             // row i is the eigenvector of values[i]
};

// Cyclic Jacobi on a symmetric matrix. Adequate for the dimensionalities
// handled here (<= ~1k) and dependency-free.
SymEig sym_eig(const DMatrix& a, double tol = 1e-10, int max_sweeps = 100);

// V * diag(f(lambda)) * V^T for a function applied to the eigenvalues.
DMatrix sym_function(const SymEig& eig, const std::vector<double>& transformed_values);

DMatrix sym_inverse(const DMatrix& a);

double sym_logdet(const DMatrix& a);

DMatrix covariance(const DMatrix& x, const std::vector<double>& mean, double denom);

}  // namespace satforge::backend
