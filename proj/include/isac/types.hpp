#ifndef ISAC_TYPES_HPP
#define ISAC_TYPES_HPP

#include <Eigen/Dense>
#include <complex>

namespace isac {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

constexpr double kPi = 3.14159265358979323846;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// (A + A^H)/2, absorbing floating-point asymmetry.
inline CMat hermitize(const CMat& a) { return 0.5 * (a + a.adjoint()); }
inline RMat symmetrize(const RMat& a) { return 0.5 * (a + a.transpose()); }

}  // namespace isac

#endif  // ISAC_TYPES_HPP
