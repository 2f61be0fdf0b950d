// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_TESTS_SUPPORT_HPP
#define MFLR_TESTS_SUPPORT_HPP

// Reference implementations used as test oracles. They deliberately avoid the
// library's own solvers: plain loops, Gaussian elimination, sorting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>
#include "mflr/mflr.hpp"

namespace oracle
{

using mflr::Matrix;
using mflr::Vector;

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double scale = 1.0)
{
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, scale);
  Matrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
  {
    for (Eigen::Index i = 0; i < rows; ++i)
    {
      a(i, j) = nd(gen);
    }
  }
  return a;
}

inline Matrix random_uniform(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double lo = 0.0, double hi = 1.0)
{
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ud(lo, hi);
  Matrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
  {
    for (Eigen::Index i = 0; i < rows; ++i)
    {
      a(i, j) = ud(gen);
    }
  }
  return a;
}

inline Matrix multiply(const Matrix &a, const Matrix &b)
{
  Matrix c = Matrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < b.cols(); ++j)
    {
      double s = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k)
      {
        s += a(i, k) * b(k, j);
      }
      c(i, j) = s;
    }
  }
  return c;
}

inline Matrix transpose(const Matrix &a)
{
  Matrix t(a.cols(), a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
    {
      t(j, i) = a(i, j);
    }
  }
  return t;
}

// Solves the square system A X = B by Gaussian elimination with partial pivoting.
inline Matrix gauss_solve(Matrix a, Matrix b)
{
  const Eigen::Index n = a.rows();
  for (Eigen::Index col = 0; col < n; ++col)
  {
    Eigen::Index piv = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
    {
      if (std::abs(a(r, col)) > std::abs(a(piv, col)))
      {
        piv = r;
      }
    }
    a.row(col).swap(a.row(piv));
    b.row(col).swap(b.row(piv));
    for (Eigen::Index r = col + 1; r < n; ++r)
    {
      const double f = a(r, col) / a(col, col);
      for (Eigen::Index c = col; c < n; ++c)
      {
        a(r, c) -= f * a(col, c);
      }
      for (Eigen::Index c = 0; c < b.cols(); ++c)
      {
        b(r, c) -= f * b(col, c);
      }
    }
  }
  Matrix x(n, b.cols());
  for (Eigen::Index r = n - 1; r >= 0; --r)
  {
    for (Eigen::Index c = 0; c < b.cols(); ++c)
    {
      double s = b(r, c);
      for (Eigen::Index k = r + 1; k < n; ++k)
      {
        s -= a(r, k) * x(k, c);
      }
      x(r, c) = s / a(r, r);
    }
  }
  return x;
}

// (Phi^T W Phi)^{-1} Phi^T W T, with W = diag(w).
inline Matrix weighted_normal_equations(const Matrix &phi, const Matrix &t, const Vector &w)
{
  Matrix wphi = phi;
  Matrix wt = t;
  for (Eigen::Index i = 0; i < phi.rows(); ++i)
  {
    wphi.row(i) *= w(i);
    wt.row(i) *= w(i);
  }
  return gauss_solve(multiply(transpose(phi), wphi), multiply(transpose(phi), wt));
}

inline Matrix normal_equations(const Matrix &phi, const Matrix &t)
{
  return weighted_normal_equations(phi, t, Vector::Ones(phi.rows()));
}

// numpy-style 'linear' percentile computed from ranks of a sorted copy.
inline double percentile(std::vector<double> v, double q)
{
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// All exponent vectors with total degree <= degree, sorted by total degree and
// then lexicographically descending.
inline std::vector<std::vector<int>> exponents(int d, int degree)
{
  std::vector<std::vector<int>> out;
  std::vector<int> e(static_cast<std::size_t>(d), 0);
  while (true)
  {
    int total = 0;
    for (int v : e)
    {
      total += v;
    }
    if (total <= degree)
    {
      out.push_back(e);
    }
    int i = 0;
    while (i < d && e[static_cast<std::size_t>(i)] == degree)
    {
      e[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == d)
    {
      break;
    }
    ++e[static_cast<std::size_t>(i)];
  }
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    int ta = 0;
    int tb = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
      ta += a[i];
      tb += b[i];
    }
    if (ta != tb)
    {
      return ta < tb;
    }
    return a > b;
  });
  return out;
}

// Design matrix from exponent vectors, on raw (unscaled) inputs.
inline Matrix design(const std::vector<std::vector<int>> &ex, const Matrix &x)
{
  Matrix phi(x.cols(), static_cast<Eigen::Index>(ex.size()));
  for (Eigen::Index j = 0; j < x.cols(); ++j)
  {
    for (std::size_t f = 0; f < ex.size(); ++f)
    {
      double v = 1.0;
      for (std::size_t i = 0; i < ex[f].size(); ++i)
      {
        v *= std::pow(x(static_cast<Eigen::Index>(i), j), ex[f][i]);
      }
      phi(j, static_cast<Eigen::Index>(f)) = v;
    }
  }
  return phi;
}

inline double rel_diff(const Matrix &a, const Matrix &b)
{
  const double denom = std::max(b.norm(), 1e-300);
  return (a - b).norm() / denom;
}

// Output fields Y = mean + U * c(x) with c a polynomial of the given degree
// in x; U has orthonormal columns. Used to build data in a known model class.
struct LowRankProcess
{
  Vector mean;
  Matrix modes;  // m x k, orthonormal
  Matrix coefficients;  // p x k over raw-input monomials
  std::vector<std::vector<int>> ex;

  LowRankProcess(int d, int m, int k, int degree, std::uint64_t seed, double scale = 1.0)
  {
    ex = exponents(d, degree);
    mean = random_matrix(m, 1, seed, 1.0).col(0).array() + 3.0;
    Eigen::HouseholderQR<Matrix> qr(random_matrix(m, k, seed + 1));
    modes = qr.householderQ() * Matrix::Identity(m, k);
    coefficients = random_matrix(static_cast<Eigen::Index>(ex.size()), k, seed + 2, scale);
  }

  Matrix states(const Matrix &x) const { return transpose(multiply(design(ex, x), coefficients)); }

  Matrix outputs(const Matrix &x) const
  {
    Matrix y = multiply(modes, states(x));
    for (Eigen::Index j = 0; j < y.cols(); ++j)
    {
      y.col(j) += mean;
    }
    return y;
  }

  mflr::Dataset dataset(const Matrix &x, mflr::Fidelity f = mflr::Fidelity::HF) const
  {
    mflr::Dataset ds;
    ds.inputs = x;
    ds.outputs = outputs(x);
    ds.fidelity = f;
    return ds;
  }
};

inline std::filesystem::path temp_dir(const std::string &name)
{
  const auto dir = std::filesystem::temp_directory_path() / ("mflr_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle

#endif  // MFLR_TESTS_SUPPORT_HPP
