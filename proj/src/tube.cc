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


#include "tubepred/tube.h"

#include <fmt/format.h>

#include <stdexcept>

namespace tubepred {

std::string PredictionHorizon::Tag() const {
  if (past_offset == 0 && num_future == 0) return "AMTnet";
  return fmt::format("TPnet_{}{}{}", past_offset, future_step, num_future);
}

void PredictionHorizon::Validate() const {
  if (past_offset < 0) throw std::invalid_argument("past offset must be >= 0");
  if (future_step < 1) throw std::invalid_argument("future step must be >= 1");
  if (num_future < 0) {
    throw std::invalid_argument("number of future steps must be >= 0");
  }
}

FrameBoxes ActionTube::Full() const {
  FrameBoxes all = detected;
  all.insert(predicted.begin(), predicted.end());
  return all;
}

}  // namespace tubepred
