#pragma once

#include <Eigen/Dense>
#include <complex>

#include "parallel_spectra/errors.hpp"

namespace paraspec {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using StateVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Dirac norm sqrt(sum |v_i|^2).
inline double dirac_norm(const StateVector& v) { return v.norm(); }

/// Dirac inner product <u|w> = sum conj(u_i) w_i.
inline Complex dirac_inner(const StateVector& u, const StateVector& w) {
    if (u.size() != w.size()) throw Error("dirac_inner: dimension mismatch");
    return u.dot(w); // Eigen's dot conjugates the left argument
}

/// Numerical tolerances used across the spectral and correspondence stack.
struct Tolerances {
    double eig = 1e-10;   ///< eigenpair residual bound, relative to ||M||
    double real = 1e-8;   ///< |Im(lambda)| below which an eigenvalue counts as real
    double match = 1e-8;  ///< eigenvalue distance for cross-system matching
    double norm = 1e-12;  ///< unit-norm slack
    double ep = 1e-6;     ///< biorthogonal overlap threshold for coalescence

    void validate() const {
        if (!(eig > 0 && real > 0 && match > 0 && norm > 0 && ep > 0))
            throw Error("Tolerances: all fields must be strictly positive");
    }
};

} // namespace paraspec
