#include "ugfem/polynomial.hpp"

namespace ugfem {

ScaledMonomials::ScaledMonomials(int degree, const Vec2& center, double scale)
    : degree_(degree), center_(center), scale_(scale) {}

void ScaledMonomials::eval(const std::vector<Vec2>& pts, Eigen::MatrixXd& val, Eigen::MatrixXd* dx,
                           Eigen::MatrixXd* dy) const {
  const int nq = static_cast<int>(pts.size());
  const int nm = size();
  val.resize(nm, nq);
  if (dx) dx->setZero(nm, nq);
  if (dy) dy->setZero(nm, nq);
  std::vector<double> px(degree_ + 1), py(degree_ + 1);
  for (int q = 0; q < nq; ++q) {
    double xi = (pts[q].x() - center_.x()) / scale_;
    double eta = (pts[q].y() - center_.y()) / scale_;
    px[0] = py[0] = 1.0;
    for (int i = 1; i <= degree_; ++i) {
      px[i] = px[i - 1] * xi;
      py[i] = py[i - 1] * eta;
    }
    for (int n = 0; n <= degree_; ++n)
      for (int b = 0; b <= n; ++b) {
        int a = n - b;
        int id = index(a, b);
        val(id, q) = px[a] * py[b];
        if (dx && a > 0) (*dx)(id, q) = a * px[a - 1] * py[b] / scale_;
        if (dy && b > 0) (*dy)(id, q) = b * px[a] * py[b - 1] / scale_;
      }
  }
}

void shifted_legendre(int n, double t, double* out) {
  double x = 2.0 * t - 1.0;
  out[0] = 1.0;
  if (n >= 1) out[1] = x;
  for (int k = 2; k <= n; ++k) out[k] = ((2 * k - 1) * x * out[k - 1] - (k - 1) * out[k - 2]) / k;
}

}  // namespace ugfem
