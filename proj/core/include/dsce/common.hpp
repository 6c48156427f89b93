// SPDX-License-Identifier: Apache-2.0
//
// dsce-sim: link-level simulation of FDD FD-MIMO downlink CSIT acquisition
// via directional spatial channel estimation.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef DSCE_COMMON_HPP
#define DSCE_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace dsce
{

constexpr double pi = 3.141592653589793238462643383279502884;

inline double deg2rad(double deg) { return deg * (pi / 180.0); }
inline double rad2deg(double rad) { return rad * (180.0 / pi); }

using cx = std::complex<double>;

/// Thrown when a linear system that the caller must keep regular turns out
/// singular (rank-deficient Capon covariance, zero-regularized MMSE gram,
/// rank-deficient ZF stack).
class SingularMatrixError : public std::runtime_error
{
  public:
    explicit SingularMatrixError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace dsce

#endif
