/* Copyright 2026 The Tubepred Authors.

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

// Data-parallel inner loops. Every kernel in `tubepred::kernels` is an OpenMP
// loop with a plain serial twin in `tubepred::kernels::serial`; the two must
// produce bit-identical results, which the kernel tests assert.

#ifndef TUBEPRED_KERNELS_H_
#define TUBEPRED_KERNELS_H_

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <vector>

#include "tubepred/geometry.h"

namespace tubepred {

enum class Execution { kSerial, kParallel };

namespace kernels {

// Dense row-major matrix of reals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// M(i, j) = mean IoU of prior i against ground-truth micro-tube j.
Matrix MeanIouMatrix(std::span<const BoundingBox> priors,
                     std::span<const MicroTubeBoxes> gts);

// Symmetric M(i, j) = MicroTubeIou(tubes[i], tubes[j]), unit diagonal for
// positive-area tubes.
Matrix MicroTubeIouMatrix(std::span<const MicroTubeBoxes> tubes);

// M(i, j) = TubeIou(*dets[i], *gts[j]).
Matrix TubeIouMatrix(std::span<const FrameBoxes* const> dets,
                     std::span<const FrameBoxes* const> gts);

namespace serial {

Matrix MeanIouMatrix(std::span<const BoundingBox> priors,
                     std::span<const MicroTubeBoxes> gts);
Matrix MicroTubeIouMatrix(std::span<const MicroTubeBoxes> tubes);
Matrix TubeIouMatrix(std::span<const FrameBoxes* const> dets,
                     std::span<const FrameBoxes* const> gts);

}  // namespace serial

// Runs body(i) for i in [0, n). Under kParallel the iterations are spread over
// an OpenMP team; the first exception thrown by any iteration is rethrown on
// the calling thread once the loop finishes.
template <typename Body>
void ForEachIndex(std::size_t n, Execution execution, Body&& body) {
  if (execution == Execution::kSerial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace kernels
}  // namespace tubepred

#endif  // TUBEPRED_KERNELS_H_
