#pragma once

#include <functional>
#include <memory>

#include <Eigen/Core>

#include "ugfem/fe_space.hpp"
#include "ugfem/quadrature.hpp"

namespace ugfem {

/// Scalar field evaluable element by element; grad is 2 x npts.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual void eval(int K, const std::vector<Vec2>& pts, Eigen::VectorXd& val, Eigen::MatrixXd* grad) const = 0;
};

/// Vector field evaluable element by element; val is 2 x npts.
class VectorField {
 public:
  virtual ~VectorField() = default;
  virtual void eval(int K, const std::vector<Vec2>& pts, Eigen::MatrixXd& val, Eigen::VectorXd* div) const = 0;
};

/// Single-valued scalar datum on edges (û, or the n_e-component of p̂).
class EdgeField {
 public:
  virtual ~EdgeField() = default;
  virtual void eval(int e, const PhysicalQuadrature& q, Eigen::VectorXd& val) const = 0;
};

using ScalarFieldPtr = std::shared_ptr<const ScalarField>;
using VectorFieldPtr = std::shared_ptr<const VectorField>;
using EdgeFieldPtr = std::shared_ptr<const EdgeField>;

class DiscreteScalar : public ScalarField {
 public:
  DiscreteScalar(SpacePtr space, Eigen::VectorXd coeffs);
  void eval(int K, const std::vector<Vec2>& pts, Eigen::VectorXd& val, Eigen::MatrixXd* grad) const override;
  const SpacePtr& space() const { return space_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }

 private:
  SpacePtr space_;
  Eigen::VectorXd coeffs_;
};

class DiscreteVector : public VectorField {
 public:
  DiscreteVector(SpacePtr space, Eigen::VectorXd coeffs);
  void eval(int K, const std::vector<Vec2>& pts, Eigen::MatrixXd& val, Eigen::VectorXd* div) const override;
  const SpacePtr& space() const { return space_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }

 private:
  SpacePtr space_;
  Eigen::VectorXd coeffs_;
};

class DiscreteEdge : public EdgeField {
 public:
  DiscreteEdge(SpacePtr space, Eigen::VectorXd coeffs);
  void eval(int e, const PhysicalQuadrature& q, Eigen::VectorXd& val) const override;

 private:
  SpacePtr space_;
  Eigen::VectorXd coeffs_;
};

class AnalyticScalar : public ScalarField {
 public:
  AnalyticScalar(ScalarFunction f, VectorFunction grad = {});
  void eval(int K, const std::vector<Vec2>& pts, Eigen::VectorXd& val, Eigen::MatrixXd* grad) const override;

 private:
  ScalarFunction f_;
  VectorFunction grad_;
};

class AnalyticVector : public VectorField {
 public:
  AnalyticVector(VectorFunction f, ScalarFunction div = {});
  void eval(int K, const std::vector<Vec2>& pts, Eigen::MatrixXd& val, Eigen::VectorXd* div) const override;

 private:
  VectorFunction f_;
  ScalarFunction div_;
};

/// Edge datum given by a function of position, e.g. u on edges or p·n_e.
class AnalyticEdge : public EdgeField {
 public:
  explicit AnalyticEdge(std::function<double(int e, const Vec2&)> f);
  void eval(int e, const PhysicalQuadrature& q, Eigen::VectorXd& val) const override;

 private:
  std::function<double(int, const Vec2&)> f_;
};

/// a - b for each field kind.
ScalarFieldPtr difference(ScalarFieldPtr a, ScalarFieldPtr b);
VectorFieldPtr difference(VectorFieldPtr a, VectorFieldPtr b);
EdgeFieldPtr difference(EdgeFieldPtr a, EdgeFieldPtr b);

/// t * a for each field kind.
ScalarFieldPtr scaled(double t, ScalarFieldPtr a);
VectorFieldPtr scaled(double t, VectorFieldPtr a);
EdgeFieldPtr scaled(double t, EdgeFieldPtr a);

/// Trace of a scalar field from element K onto the points of an edge quadrature.
Eigen::VectorXd trace_values(const ScalarField& f, int K, const PhysicalQuadrature& q);

/// Normal component p·n (n fixed) of a vector field from element K on edge points.
Eigen::VectorXd normal_trace_values(const VectorField& f, int K, const PhysicalQuadrature& q, const Vec2& n);

}  // namespace ugfem
