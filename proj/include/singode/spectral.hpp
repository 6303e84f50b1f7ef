// Invariant-subspace splitting of a real matrix by the sign of Re(lambda).
// Primary path groups eigenvectors; defective groups fall back to the kernel
// of the group's characteristic polynomial evaluated on A, which handles
// Jordan structure (nilpotent center blocks included).
#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "singode/errors.hpp"
#include "singode/poly.hpp"

namespace singode {

struct SpectralSplit {
    Mat center;    // d x k_c orthonormal
    Mat stable;    // d x k_s orthonormal
    Mat unstable;  // d x k_u orthonormal
    std::vector<std::complex<double>> center_eigs;
    std::vector<std::complex<double>> stable_eigs;
    std::vector<std::complex<double>> unstable_eigs;
};

namespace detail {

// Orthonormal basis of the invariant subspace for the eigenvalue group
// `eigs` (closed under conjugation).
inline Mat group_subspace(const Mat& A, const Eigen::EigenSolver<Mat>& es,
                          const std::vector<int>& idx,
                          const std::vector<std::complex<double>>& eigs) {
    const int d = static_cast<int>(A.rows());
    const int k = static_cast<int>(idx.size());
    if (k == 0) return Mat(d, 0);
    if (k == d) return Mat::Identity(d, d);

    const Eigen::MatrixXcd evecs = es.eigenvectors();
    Mat raw(d, k);
    int col = 0;
    for (size_t j = 0; j < idx.size() && col < k; ++j) {
        if (std::abs(es.eigenvalues()[idx[j]].imag()) > 0.0) {
            raw.col(col++) = evecs.col(idx[j]).real();
            if (col < k) raw.col(col++) = evecs.col(idx[j]).imag();
        } else {
            raw.col(col++) = evecs.col(idx[j]).real();
        }
    }
    Eigen::JacobiSVD<Mat> svd(raw.leftCols(col), Eigen::ComputeThinU);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > 1e-10 * svd.singularValues()[0]) ++rank;

    Mat basis;
    if (rank == k) {
        basis = svd.matrixU().leftCols(k);
    } else {
        // Defective group: invariant subspace = ker prod (A - lambda I),
        // complex pairs combined into real quadratic factors.
        Mat P = Mat::Identity(d, d);
        std::vector<std::complex<double>> pending(eigs);
        while (!pending.empty()) {
            const auto lam = pending.back();
            pending.pop_back();
            if (std::abs(lam.imag()) > 0.0) {
                auto conj_it = std::find_if(pending.begin(), pending.end(), [&](auto m) {
                    return std::abs(m.real() - lam.real()) < 1e-12 &&
                           std::abs(m.imag() + lam.imag()) < 1e-12;
                });
                if (conj_it != pending.end()) pending.erase(conj_it);
                P = (A * A - 2.0 * lam.real() * A +
                     std::norm(lam) * Mat::Identity(d, d)) *
                    P;
            } else {
                P = (A - lam.real() * Mat::Identity(d, d)) * P;
            }
        }
        Eigen::JacobiSVD<Mat> ksvd(P, Eigen::ComputeFullV);
        basis = ksvd.matrixV().rightCols(k);
    }

    // Invariance audit.
    const double scale = std::max(1.0, A.norm());
    const double defect = ((Mat::Identity(d, d) - basis * basis.transpose()) * A * basis).norm();
    if (defect > 1e-6 * scale)
        throw IllConditioned("spectral_split: invariant subspace defect " +
                             std::to_string(defect));
    return basis;
}

}  // namespace detail

// Groups the spectrum of A into Re(lambda) < -tol_center (stable),
// |Re(lambda)| <= tol_center (center) and Re(lambda) > tol_center (unstable).
// Throws IllConditioned when an eigenvalue hugs the classification boundary
// (within 1% of tol_center) or an invariant subspace cannot be resolved.
inline SpectralSplit spectral_split(const Mat& A, double tol_center = 1e-8) {
    if (A.rows() != A.cols()) throw Error("spectral_split: matrix not square");
    Eigen::EigenSolver<Mat> es(A);
    if (es.info() != Eigen::Success) throw IllConditioned("spectral_split: eigensolver failed");

    const double margin = 0.01 * tol_center;
    std::vector<int> ic, is, iu;
    SpectralSplit out;
    for (int i = 0; i < A.rows(); ++i) {
        const auto lam = es.eigenvalues()[i];
        const double re = lam.real();
        if (std::abs(re) > tol_center && std::abs(std::abs(re) - tol_center) < margin)
            throw IllConditioned("spectral_split: eigenvalue Re = " + std::to_string(re) +
                                 " within the conditioning margin of the center band");
        if (re < -tol_center) {
            is.push_back(i);
            out.stable_eigs.push_back(lam);
        } else if (re > tol_center) {
            iu.push_back(i);
            out.unstable_eigs.push_back(lam);
        } else {
            ic.push_back(i);
            out.center_eigs.push_back(lam);
        }
    }
    out.center = detail::group_subspace(A, es, ic, out.center_eigs);
    out.stable = detail::group_subspace(A, es, is, out.stable_eigs);
    out.unstable = detail::group_subspace(A, es, iu, out.unstable_eigs);
    return out;
}

// Orthonormal basis of the orthogonal complement of the (orthonormal) columns
// of V.
inline Mat orthogonal_complement(const Mat& V) {
    const int d = static_cast<int>(V.rows());
    const int k = static_cast<int>(V.cols());
    if (k == 0) return Mat::Identity(d, d);
    if (k == d) return Mat(d, 0);
    Eigen::HouseholderQR<Mat> qr(V);
    Mat Q = qr.householderQ();
    return Q.rightCols(d - k);
}

}  // namespace singode
