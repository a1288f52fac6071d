/* Copyright 2026 The avexplore Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "avx/mlp.hpp"

#include <cmath>

#include "avx/common.hpp"

namespace avx {

Mlp::Mlp(std::size_t inputs, std::size_t hidden, std::size_t outputs, std::uint64_t seed) {
  const auto in = static_cast<Eigen::Index>(inputs);
  const auto h = static_cast<Eigen::Index>(hidden);
  const auto out = static_cast<Eigen::Index>(outputs);
  Rng rng(seed);
  w1_.resize(h, in);
  w2_.resize(out, h);
  // He initialization.
  const double s1 = std::sqrt(2.0 / static_cast<double>(inputs));
  const double s2 = std::sqrt(2.0 / static_cast<double>(hidden));
  for (Eigen::Index j = 0; j < w1_.cols(); ++j)
    for (Eigen::Index i = 0; i < w1_.rows(); ++i) w1_(i, j) = s1 * rng.normal();
  for (Eigen::Index j = 0; j < w2_.cols(); ++j)
    for (Eigen::Index i = 0; i < w2_.rows(); ++i) w2_(i, j) = s2 * rng.normal();
  b1_ = Eigen::VectorXd::Zero(h);
  b2_ = Eigen::VectorXd::Zero(out);
  velocity_ = {Eigen::MatrixXd::Zero(h, in), Eigen::VectorXd::Zero(h),
               Eigen::MatrixXd::Zero(out, h), Eigen::VectorXd::Zero(out)};
}

namespace {

Eigen::MatrixXd softmax_columns(Eigen::MatrixXd z) {
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const double m = z.col(j).maxCoeff();
    z.col(j) = (z.col(j).array() - m).exp().matrix();
    z.col(j) /= z.col(j).sum();
  }
  return z;
}

}  // namespace

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd h = ((w1_ * x).colwise() + b1_).cwiseMax(0.0);
  return softmax_columns((w2_ * h).colwise() + b2_);
}

double Mlp::loss(const Eigen::MatrixXd& x, std::span<const int> labels,
                 double weight_decay) const {
  const Eigen::MatrixXd p = forward(x);
  double ce = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j)
    ce -= std::log(std::max(p(labels[static_cast<std::size_t>(j)], j), 1e-300));
  ce /= static_cast<double>(p.cols());
  return ce + 0.5 * weight_decay * (w1_.squaredNorm() + w2_.squaredNorm());
}

double Mlp::loss_and_gradient(const Eigen::MatrixXd& x, std::span<const int> labels,
                              double weight_decay, Gradients& g) const {
  const auto n = static_cast<double>(x.cols());
  const Eigen::MatrixXd pre = (w1_ * x).colwise() + b1_;
  const Eigen::MatrixXd h = pre.cwiseMax(0.0);
  Eigen::MatrixXd p = softmax_columns((w2_ * h).colwise() + b2_);

  double ce = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    const int y = labels[static_cast<std::size_t>(j)];
    ce -= std::log(std::max(p(y, j), 1e-300));
    p(y, j) -= 1.0;
  }
  const Eigen::MatrixXd dz = p / n;
  g.w2 = dz * h.transpose() + weight_decay * w2_;
  g.b2 = dz.rowwise().sum();
  const Eigen::MatrixXd dh =
      ((w2_.transpose() * dz).array() * (pre.array() > 0.0).cast<double>()).matrix();
  g.w1 = dh * x.transpose() + weight_decay * w1_;
  g.b1 = dh.rowwise().sum();
  return ce / n + 0.5 * weight_decay * (w1_.squaredNorm() + w2_.squaredNorm());
}

std::size_t Mlp::parameter_count() const {
  return static_cast<std::size_t>(w1_.size() + b1_.size() + w2_.size() + b2_.size());
}

double& Mlp::parameter(std::size_t i) {
  auto k = static_cast<Eigen::Index>(i);
  if (k < w1_.size()) return w1_.data()[k];
  k -= w1_.size();
  if (k < b1_.size()) return b1_.data()[k];
  k -= b1_.size();
  if (k < w2_.size()) return w2_.data()[k];
  k -= w2_.size();
  if (k < b2_.size()) return b2_.data()[k];
  throw ValidationError("Mlp::parameter: index out of range");
}

double Mlp::gradient_at(const Gradients& g, std::size_t i) {
  auto k = static_cast<Eigen::Index>(i);
  if (k < g.w1.size()) return g.w1.data()[k];
  k -= g.w1.size();
  if (k < g.b1.size()) return g.b1.data()[k];
  k -= g.b1.size();
  if (k < g.w2.size()) return g.w2.data()[k];
  k -= g.w2.size();
  if (k < g.b2.size()) return g.b2.data()[k];
  throw ValidationError("Mlp::gradient_at: index out of range");
}

void Mlp::step(const Gradients& g, double lr, double momentum) {
  velocity_.w1 = momentum * velocity_.w1 - lr * g.w1;
  velocity_.b1 = momentum * velocity_.b1 - lr * g.b1;
  velocity_.w2 = momentum * velocity_.w2 - lr * g.w2;
  velocity_.b2 = momentum * velocity_.b2 - lr * g.b2;
  w1_ += velocity_.w1;
  b1_ += velocity_.b1;
  w2_ += velocity_.w2;
  b2_ += velocity_.b2;
}

}  // namespace avx
