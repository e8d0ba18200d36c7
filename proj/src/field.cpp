#include "ugfem/field.hpp"

#include "ugfem/errors.hpp"

namespace ugfem {

DiscreteScalar::DiscreteScalar(SpacePtr space, Eigen::VectorXd coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  require(space_ && !space_->is_vector() && !space_->is_edge_space(), ErrorCode::Incompatible,
          "DiscreteScalar needs a scalar volume space");
  require(coeffs_.size() == space_->dim(), ErrorCode::InvalidArgument, "coefficient size mismatch");
}

void DiscreteScalar::eval(int K, const std::vector<Vec2>& pts, Eigen::VectorXd& val, Eigen::MatrixXd* grad) const {
  BasisValues b;
  space_->evaluate(K, pts, b, grad != nullptr);
  Eigen::VectorXd c = space_->gather(K, coeffs_);
  val = b.val.transpose() * c;
  if (grad) {
    grad->resize(2, static_cast<Eigen::Index>(pts.size()));
    grad->row(0) = (b.dx.transpose() * c).transpose();
    grad->row(1) = (b.dy.transpose() * c).transpose();
  }
}

DiscreteVector::DiscreteVector(SpacePtr space, Eigen::VectorXd coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  require(space_ && space_->is_vector() && !space_->is_edge_space(), ErrorCode::Incompatible,
          "DiscreteVector needs a vector volume space");
  require(coeffs_.size() == space_->dim(), ErrorCode::InvalidArgument, "coefficient size mismatch");
}

void DiscreteVector::eval(int K, const std::vector<Vec2>& pts, Eigen::MatrixXd& val, Eigen::VectorXd* div) const {
  BasisValues b;
  space_->evaluate(K, pts, b, div != nullptr);
  Eigen::VectorXd c = space_->gather(K, coeffs_);
  val.resize(2, static_cast<Eigen::Index>(pts.size()));
  val.row(0) = (b.vx.transpose() * c).transpose();
  val.row(1) = (b.vy.transpose() * c).transpose();
  if (div) *div = b.div.transpose() * c;
}

DiscreteEdge::DiscreteEdge(SpacePtr space, Eigen::VectorXd coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  require(space_ && space_->is_edge_space(), ErrorCode::Incompatible, "DiscreteEdge needs an edge space");
  require(coeffs_.size() == space_->dim(), ErrorCode::InvalidArgument, "coefficient size mismatch");
}

void DiscreteEdge::eval(int e, const PhysicalQuadrature& q, Eigen::VectorXd& val) const {
  Eigen::MatrixXd b;
  space_->eval_edge(e, q.params, b);
  val = b.transpose() * space_->gather(e, coeffs_);
}

AnalyticScalar::AnalyticScalar(ScalarFunction f, VectorFunction grad) : f_(std::move(f)), grad_(std::move(grad)) {}

void AnalyticScalar::eval(int, const std::vector<Vec2>& pts, Eigen::VectorXd& val, Eigen::MatrixXd* grad) const {
  const auto n = static_cast<Eigen::Index>(pts.size());
  val.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) val(i) = f_(pts[i]);
  if (grad) {
    require(static_cast<bool>(grad_), ErrorCode::Incompatible, "analytic field has no gradient");
    grad->resize(2, n);
    for (Eigen::Index i = 0; i < n; ++i) grad->col(i) = grad_(pts[i]);
  }
}

AnalyticVector::AnalyticVector(VectorFunction f, ScalarFunction div) : f_(std::move(f)), div_(std::move(div)) {}

void AnalyticVector::eval(int, const std::vector<Vec2>& pts, Eigen::MatrixXd& val, Eigen::VectorXd* div) const {
  const auto n = static_cast<Eigen::Index>(pts.size());
  val.resize(2, n);
  for (Eigen::Index i = 0; i < n; ++i) val.col(i) = f_(pts[i]);
  if (div) {
    require(static_cast<bool>(div_), ErrorCode::Incompatible, "analytic field has no divergence");
    div->resize(n);
    for (Eigen::Index i = 0; i < n; ++i) (*div)(i) = div_(pts[i]);
  }
}

AnalyticEdge::AnalyticEdge(std::function<double(int, const Vec2&)> f) : f_(std::move(f)) {}

void AnalyticEdge::eval(int e, const PhysicalQuadrature& q, Eigen::VectorXd& val) const {
  val.resize(q.size());
  for (int i = 0; i < q.size(); ++i) val(i) = f_(e, q.points[i]);
}

namespace {

class ScalarCombo : public ScalarField {
 public:
  ScalarCombo(double ta, ScalarFieldPtr a, double tb, ScalarFieldPtr b) : ta_(ta), tb_(tb), a_(std::move(a)), b_(std::move(b)) {}
  void eval(int K, const std::vector<Vec2>& pts, Eigen::VectorXd& val, Eigen::MatrixXd* grad) const override {
    Eigen::VectorXd va;
    Eigen::MatrixXd ga;
    a_->eval(K, pts, va, grad ? &ga : nullptr);
    val = ta_ * va;
    if (grad) *grad = ta_ * ga;
    if (b_) {
      Eigen::VectorXd vb;
      Eigen::MatrixXd gb;
      b_->eval(K, pts, vb, grad ? &gb : nullptr);
      val += tb_ * vb;
      if (grad) *grad += tb_ * gb;
    }
  }

 private:
  double ta_, tb_;
  ScalarFieldPtr a_, b_;
};

class VectorCombo : public VectorField {
 public:
  VectorCombo(double ta, VectorFieldPtr a, double tb, VectorFieldPtr b) : ta_(ta), tb_(tb), a_(std::move(a)), b_(std::move(b)) {}
  void eval(int K, const std::vector<Vec2>& pts, Eigen::MatrixXd& val, Eigen::VectorXd* div) const override {
    Eigen::MatrixXd va;
    Eigen::VectorXd da;
    a_->eval(K, pts, va, div ? &da : nullptr);
    val = ta_ * va;
    if (div) *div = ta_ * da;
    if (b_) {
      Eigen::MatrixXd vb;
      Eigen::VectorXd db;
      b_->eval(K, pts, vb, div ? &db : nullptr);
      val += tb_ * vb;
      if (div) *div += tb_ * db;
    }
  }

 private:
  double ta_, tb_;
  VectorFieldPtr a_, b_;
};

class EdgeCombo : public EdgeField {
 public:
  EdgeCombo(double ta, EdgeFieldPtr a, double tb, EdgeFieldPtr b) : ta_(ta), tb_(tb), a_(std::move(a)), b_(std::move(b)) {}
  void eval(int e, const PhysicalQuadrature& q, Eigen::VectorXd& val) const override {
    Eigen::VectorXd va;
    a_->eval(e, q, va);
    val = ta_ * va;
    if (b_) {
      Eigen::VectorXd vb;
      b_->eval(e, q, vb);
      val += tb_ * vb;
    }
  }

 private:
  double ta_, tb_;
  EdgeFieldPtr a_, b_;
};

}  // namespace

ScalarFieldPtr difference(ScalarFieldPtr a, ScalarFieldPtr b) { return std::make_shared<ScalarCombo>(1.0, a, -1.0, b); }
VectorFieldPtr difference(VectorFieldPtr a, VectorFieldPtr b) { return std::make_shared<VectorCombo>(1.0, a, -1.0, b); }
EdgeFieldPtr difference(EdgeFieldPtr a, EdgeFieldPtr b) { return std::make_shared<EdgeCombo>(1.0, a, -1.0, b); }
ScalarFieldPtr scaled(double t, ScalarFieldPtr a) { return std::make_shared<ScalarCombo>(t, a, 0.0, nullptr); }
VectorFieldPtr scaled(double t, VectorFieldPtr a) { return std::make_shared<VectorCombo>(t, a, 0.0, nullptr); }
EdgeFieldPtr scaled(double t, EdgeFieldPtr a) { return std::make_shared<EdgeCombo>(t, a, 0.0, nullptr); }

Eigen::VectorXd trace_values(const ScalarField& f, int K, const PhysicalQuadrature& q) {
  Eigen::VectorXd v;
  f.eval(K, q.points, v, nullptr);
  return v;
}

Eigen::VectorXd normal_trace_values(const VectorField& f, int K, const PhysicalQuadrature& q, const Vec2& n) {
  Eigen::MatrixXd v;
  f.eval(K, q.points, v, nullptr);
  return (n.transpose() * v).transpose();
}

}  // namespace ugfem
