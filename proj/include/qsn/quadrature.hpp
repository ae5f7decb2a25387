// Copyright 2026 The qsn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qsn/types.hpp"

namespace qsn {

// Gauss-Hermite rule for the standard normal weight exp(-x^2/2)/sqrt(2 pi).
// Weights sum to one.
struct GaussHermiteRule {
  RVector nodes;
  RVector weights;
};

// Golub-Welsch on the probabilists' Hermite Jacobi matrix.
GaussHermiteRule gauss_hermite_normal(int points);

}  // namespace qsn
