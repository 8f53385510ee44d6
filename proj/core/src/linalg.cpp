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

#include "beamkey/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace beamkey::linalg
{
    CMatrix kron(const CMatrix &a, const CMatrix &b)
    {
        const auto br = b.rows(), bc = b.cols();
        CMatrix out(a.rows() * br, a.cols() * bc);
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                out.block(i * br, j * bc, br, bc) = a(i, j) * b;
        return out;
    }

    CVector vec(const CMatrix &a)
    {
        return Eigen::Map<const CVector>(a.data(), a.size());
    }

    CMatrix unvec(const CVector &v, Eigen::Index rows, Eigen::Index cols)
    {
        if (v.size() != rows * cols)
            throw std::invalid_argument("unvec: size mismatch");
        return Eigen::Map<const CMatrix>(v.data(), rows, cols);
    }

    double hermitian_deviation(const CMatrix &a)
    {
        if (a.rows() != a.cols())
            return std::numeric_limits<double>::infinity();
        if (a.size() == 0)
            return 0.0;
        return (a - a.adjoint()).cwiseAbs().maxCoeff();
    }

    double unitarity_error(const CMatrix &a)
    {
        if (a.size() == 0)
            return 0.0;
        const CMatrix gram = a.adjoint() * a;
        return (gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    }

    double real_trace(const CMatrix &a)
    {
        return a.trace().real();
    }

    RVector hermitian_eigenvalues(const CMatrix &s)
    {
        const CMatrix h = 0.5 * (s + s.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
        return solver.eigenvalues();
    }

    Eigen::Index numerical_rank(const CMatrix &s, double rel_tol)
    {
        const RVector ev = hermitian_eigenvalues(s);
        const double threshold = rel_tol * std::max(real_trace(s), 0.0);
        return (ev.array() > threshold).count();
    }

    CMatrix psd_sqrt(const CMatrix &s)
    {
        if (s.rows() != s.cols())
            throw std::invalid_argument("psd_sqrt: matrix is not square");
        if (s.size() == 0)
            return s;
        const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
        if (hermitian_deviation(s) > 1e-10 * scale)
            throw std::invalid_argument("psd_sqrt: matrix is not Hermitian");

        const CMatrix h = 0.5 * (s + s.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
        if (solver.info() != Eigen::Success)
            throw NumericalError("psd_sqrt: eigendecomposition failed");

        const double clip = 1e-12 * std::max(real_trace(h), 0.0);
        RVector root = solver.eigenvalues();
        for (Eigen::Index i = 0; i < root.size(); ++i)
            root(i) = root(i) > clip ? std::sqrt(root(i)) : 0.0;

        const CMatrix &u = solver.eigenvectors();
        CMatrix q = u * root.asDiagonal() * u.adjoint();
        return 0.5 * (q + q.adjoint());
    }

    namespace
    {
        bool try_cholesky_logdet(const CMatrix &s, double &out)
        {
            Eigen::LLT<CMatrix> llt(s);
            if (llt.info() != Eigen::Success)
                return false;
            const auto &l = llt.matrixLLT();
            double acc = 0.0;
            for (Eigen::Index i = 0; i < l.rows(); ++i)
            {
                const double d = l(i, i).real();
                if (!(d > 0.0) || !std::isfinite(d))
                    return false;
                acc += std::log(d);
            }
            out = 2.0 * acc;
            return true;
        }
    }

    LogDet logdet_hpd(const CMatrix &s, bool allow_jitter)
    {
        if (s.rows() != s.cols())
            throw std::invalid_argument("logdet_hpd: matrix is not square");
        if (s.size() == 0)
            return {};

        const CMatrix h = 0.5 * (s + s.adjoint());
        LogDet result;
        if (try_cholesky_logdet(h, result.value))
            return result;

        if (allow_jitter)
        {
            const double jitter = 1e-12 * std::abs(real_trace(h));
            CMatrix shifted = h;
            shifted.diagonal().array() += jitter;
            if (jitter > 0.0 && try_cholesky_logdet(shifted, result.value))
            {
                result.jittered = true;
                return result;
            }
        }
        throw NumericalError("logdet_hpd: matrix is not positive definite");
    }

    double log_abs_det(const CMatrix &a)
    {
        if (a.rows() != a.cols())
            throw std::invalid_argument("log_abs_det: matrix is not square");
        if (a.size() == 0)
            return 0.0;
        Eigen::PartialPivLU<CMatrix> lu(a);
        const auto &f = lu.matrixLU();
        double acc = 0.0;
        for (Eigen::Index i = 0; i < f.rows(); ++i)
        {
            const double d = std::abs(f(i, i));
            if (d == 0.0 || !std::isfinite(d))
                throw NumericalError("log_abs_det: singular matrix");
            acc += std::log(d);
        }
        return acc;
    }
}
