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

#ifndef AVX_MLP_HPP_
#define AVX_MLP_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <span>

namespace avx {

// One hidden ReLU layer, softmax output, mean cross-entropy loss with L2
// weight decay on the two weight matrices. Inputs are columns.
class Mlp {
 public:
  struct Gradients {
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2;
    Eigen::VectorXd b2;
  };

  Mlp() = default;
  Mlp(std::size_t inputs, std::size_t hidden, std::size_t outputs, std::uint64_t seed);

  std::size_t inputs() const { return static_cast<std::size_t>(w1_.cols()); }
  std::size_t outputs() const { return static_cast<std::size_t>(w2_.rows()); }

  // Class probabilities, one column per input column.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;

  double loss(const Eigen::MatrixXd& x, std::span<const int> labels, double weight_decay) const;
  double loss_and_gradient(const Eigen::MatrixXd& x, std::span<const int> labels,
                           double weight_decay, Gradients& grad) const;

  // Flattened parameter access in the order w1, b1, w2, b2 (column-major).
  std::size_t parameter_count() const;
  double& parameter(std::size_t i);
  static double gradient_at(const Gradients& g, std::size_t i);

  // SGD with classical momentum.
  void step(const Gradients& grad, double learning_rate, double momentum);

 private:
  Eigen::MatrixXd w1_, w2_;
  Eigen::VectorXd b1_, b2_;
  Gradients velocity_;
};

}  // namespace avx

#endif  // AVX_MLP_HPP_
