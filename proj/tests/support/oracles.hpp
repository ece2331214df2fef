#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "magque/field_gauge.hpp"
#include "magque/operator_grid.hpp"

namespace oracle {

using magque::cplx;
using magque::IVec2;
using magque::Vec2;

// Dense matrix of the magnetic Laplacian plus V on the n x n grid with origin 0, built directly
// from the gauge field values: link phases by Gauss-Legendre quadrature, boundary links through
// the quasi-periodicity rule written out by hand.
Eigen::MatrixXcd dense_operator(const magque::GaugePotential& gauge, const magque::ScalarPotential& v, int n);

std::vector<double> lowest_dense(const Eigen::MatrixXcd& h, int k);

// nu_k = (1/N^2) sum_j e^{-2 pi i k.x_j} |u_j|^2 / ||u||^2 by the explicit double sum.
std::map<IVec2, cplx> density_dft(const magque::GridWavefunction& u, int k_max);

// Band-limited real field with mean 2 pi phi and random coefficients of size <= amp on |k|_inf <= kmax.
std::vector<magque::FourierMode> random_modes(std::uint64_t seed, int phi, int kmax, double amp);

// Real periodic function with random coefficients on |k|_inf <= kmax, no mean.
magque::RealFourierSeries random_periodic(std::uint64_t seed, int kmax, double amp);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace oracle
