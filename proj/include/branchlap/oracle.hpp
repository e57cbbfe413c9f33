#pragma once

#include <vector>

#include "branchlap/analysis.hpp"

namespace branchlap {

/// Separable solution in a rectangular branch of width b and length a:
/// u(x, t) = sum_n c_n sinh(gamma_n (a - x)) sin(pi n (t - t0) / b),
/// gamma_n = sqrt((pi n / b)^2 - lambda). Valid for lambda < pi^2/b^2.
struct SeriesSolution {
    std::vector<double> c;
    std::vector<double> gamma;
    double a = 0.0;
    double b = 0.0;
    double t0 = 0.0;  // transverse offset of the branch in chart coordinates
    double lambda = 0.0;

    double evaluate(double x, double t) const;
};

struct RectMode {
    double lambda = 0.0;
    int m = 0, n = 0;
};

/// lambda_mn = pi^2 (m^2/width^2 + n^2/height^2), ascending, ties preserved.
std::vector<RectMode> rectangle_spectrum(double width, double height, int k);

/// Recovers c_n from the sine transform of the junction trace u(0, .).
SeriesSolution fit_series(const Mesh& mesh, const std::vector<double>& u, double lambda,
                          const DomainSpec& spec, int N = 32);

/// Closed-form J(x0) of the series solution (ground truth for profile_J).
DecayProfile series_decay_curve(const SeriesSolution& sol, const std::vector<double>& grid);

/// Relative L2 distance between the FEM mode and the series over the branch.
double series_l2_error(const Mesh& mesh, const std::vector<double>& u, const DomainSpec& spec,
                       const SeriesSolution& sol);

class OracleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace branchlap
