// SPDX-License-Identifier: Apache-2.0
//
// beamkey: beam-domain secret key generation for multi-user massive MIMO
// Copyright (C) 2026 The beamkey Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "beamkey/common.hpp"

namespace beamkey::linalg
{
    /// Kronecker product A (x) B.
    CMatrix kron(const CMatrix &a, const CMatrix &b);

    /// Column-major vectorization.
    CVector vec(const CMatrix &a);

    /// Inverse of vec() for a rows x cols matrix.
    CMatrix unvec(const CVector &v, Eigen::Index rows, Eigen::Index cols);

    /// max |A - A^H| over all entries.
    double hermitian_deviation(const CMatrix &a);

    /// max |A^H A - I| over all entries.
    double unitarity_error(const CMatrix &a);

    /// Real trace of a Hermitian matrix.
    double real_trace(const CMatrix &a);

    /// Eigenvalues of the Hermitian part of S, ascending.
    RVector hermitian_eigenvalues(const CMatrix &s);

    /// Number of eigenvalues strictly above rel_tol * trace.
    Eigen::Index numerical_rank(const CMatrix &s, double rel_tol);

    /// Hermitian PSD square root Q (Q = Q^H, Q^H Q = S) from the
    /// eigendecomposition. Eigenvalues below 1e-12 * trace are clipped to 0.
    /// Throws std::invalid_argument when S deviates from Hermitian by more
    /// than 1e-10 (scaled by max(1, max|S|)).
    CMatrix psd_sqrt(const CMatrix &s);

    struct LogDet
    {
        double value = 0.0;   // natural log of the determinant
        bool jittered = false; // 1e-12 * trace was added to the diagonal
    };

    /// log det of a Hermitian positive definite matrix via Cholesky.
    /// When the plain factorization fails and allow_jitter is set, retries once
    /// with 1e-12 * trace on the diagonal. Throws NumericalError otherwise.
    LogDet logdet_hpd(const CMatrix &s, bool allow_jitter = true);

    /// log |det A| of a general square matrix via partial-pivot LU.
    /// Throws NumericalError on an exactly singular factor.
    double log_abs_det(const CMatrix &a);
}
