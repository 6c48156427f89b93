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

#ifndef DSCE_RNG_HPP
#define DSCE_RNG_HPP

#include <cstdint>
#include <random>

#include "dsce/common.hpp"

namespace dsce
{

/// Deterministic, splittable random stream.
///
/// split(tag) derives an independent child stream from the *creation seed*
/// only, never from draw history, so trials can be parallelized in any order
/// without changing results. All draws are generated from raw mt19937_64
/// output through fixed transforms (no std::*_distribution), so a given seed
/// produces the same sequence on every standard library.
class SeedStream
{
  public:
    explicit SeedStream(std::uint64_t seed);

    [[nodiscard]] SeedStream split(std::uint64_t tag) const;
    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();
    double uniform();                      // [0, 1)
    double uniform(double a, double b);    // [a, b)
    double normal();                       // N(0, 1)
    cx cnormal();                          // CN(0, 1)
    double exponential(double mean);
    double laplace(double std_dev);        // zero-mean Laplacian with given std
    double truncated_laplace(double std_dev, double bound_in_stds);

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// SplitMix64 finalizer; the documented seed-mixing function behind split().
std::uint64_t splitmix64(std::uint64_t z);

} // namespace dsce

#endif
