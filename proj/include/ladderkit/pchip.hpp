#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ladder {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson
/// slopes, three-point end conditions). Knots must be strictly increasing.
template <typename Scalar>
class Pchip {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Pchip() = default;

  Pchip(const Vector& x, const Vector& y) : x_(x), y_(y) {
    const Eigen::Index n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("pchip: need >= 2 matching knots");
    for (Eigen::Index i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("pchip: knots not strictly increasing");
    slopes();
  }

  template <typename Range>
  static Pchip from(const Range& xs, const Range& ys) {
    Vector x(static_cast<Eigen::Index>(std::size(xs)));
    Vector y(static_cast<Eigen::Index>(std::size(ys)));
    Eigen::Index i = 0;
    for (auto v : xs) x[i++] = static_cast<Scalar>(v);
    i = 0;
    for (auto v : ys) y[i++] = static_cast<Scalar>(v);
    return Pchip(x, y);
  }

  Scalar xmin() const { return x_[0]; }
  Scalar xmax() const { return x_[x_.size() - 1]; }
  const Vector& knots() const { return x_; }
  const Vector& values() const { return y_; }

  /// Evaluates; outside the knot range the end cubic is extended.
  Scalar operator()(Scalar x) const {
    const Eigen::Index k = segment(x);
    const Scalar t = x - x_[k];
    const Coeffs c = coeffs(k);
    return c.c0 + t * (c.c1 + t * (c.c2 + t * c.c3));
  }

  /// Exact integral of the interpolant over [a, b].
  Scalar integrate(Scalar a, Scalar b) const {
    if (a == b) return Scalar(0);
    if (a > b) return -integrate(b, a);
    Scalar total(0);
    Eigen::Index k = segment(a);
    Scalar lo = a;
    while (true) {
      const bool last = (k + 1 >= x_.size() - 1);
      const Scalar segEnd = last ? b : std::min(b, x_[k + 1]);
      total += primitive(k, segEnd - x_[k]) - primitive(k, lo - x_[k]);
      if (segEnd >= b) break;
      lo = segEnd;
      ++k;
    }
    return total;
  }

 private:
  struct Coeffs {
    Scalar c0, c1, c2, c3;
  };

  Eigen::Index segment(Scalar x) const {
    const Eigen::Index n = x_.size();
    const Scalar* begin = x_.data();
    const Scalar* it = std::upper_bound(begin, begin + n, x);
    Eigen::Index k = static_cast<Eigen::Index>(it - begin) - 1;
    return std::clamp<Eigen::Index>(k, 0, n - 2);
  }

  Coeffs coeffs(Eigen::Index k) const {
    const Scalar h = x_[k + 1] - x_[k];
    const Scalar delta = (y_[k + 1] - y_[k]) / h;
    const Scalar d0 = d_[k], d1 = d_[k + 1];
    return {y_[k], d0, (Scalar(3) * delta - Scalar(2) * d0 - d1) / h,
            (d0 + d1 - Scalar(2) * delta) / (h * h)};
  }

  Scalar primitive(Eigen::Index k, Scalar t) const {
    const Coeffs c = coeffs(k);
    return t * (c.c0 + t * (c.c1 / Scalar(2) + t * (c.c2 / Scalar(3) + t * c.c3 / Scalar(4))));
  }

  static Scalar sign(Scalar v) { return (v > 0) - (v < 0); }

  static Scalar end_slope(Scalar h0, Scalar h1, Scalar m0, Scalar m1) {
    Scalar d = ((Scalar(2) * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (sign(d) != sign(m0)) {
      d = Scalar(0);
    } else if (sign(m0) != sign(m1) && std::abs(d) > std::abs(Scalar(3) * m0)) {
      d = Scalar(3) * m0;
    }
    return d;
  }

  void slopes() {
    const Eigen::Index n = x_.size();
    d_.resize(n);
    Vector h = x_.tail(n - 1) - x_.head(n - 1);
    Vector m = (y_.tail(n - 1) - y_.head(n - 1)).cwiseQuotient(h);
    if (n == 2) {
      d_.setConstant(m[0]);
      return;
    }
    for (Eigen::Index k = 1; k < n - 1; ++k) {
      if (m[k - 1] == Scalar(0) || m[k] == Scalar(0) || sign(m[k - 1]) != sign(m[k])) {
        d_[k] = Scalar(0);
      } else {
        const Scalar w1 = Scalar(2) * h[k] + h[k - 1];
        const Scalar w2 = h[k] + Scalar(2) * h[k - 1];
        d_[k] = (w1 + w2) / (w1 / m[k - 1] + w2 / m[k]);
      }
    }
    d_[0] = end_slope(h[0], h[1], m[0], m[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
  }

  Vector x_, y_, d_;
};

}  // namespace ladder
