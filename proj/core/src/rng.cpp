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

#include "dsce/rng.hpp"

#include <algorithm>
#include <cmath>

namespace dsce
{

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

SeedStream::SeedStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

SeedStream SeedStream::split(std::uint64_t tag) const
{
    return SeedStream(splitmix64(seed_ ^ splitmix64(tag)));
}

std::uint64_t SeedStream::next_u64() { return engine_(); }

double SeedStream::uniform()
{
    // 53 uniform bits; exact on every platform.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeedStream::uniform(double a, double b) { return a + (b - a) * uniform(); }

double SeedStream::normal()
{
    if (have_spare_)
    {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller on open-interval uniforms.
    double u1 = 0.0;
    do
    {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * pi * u2);
}

cx SeedStream::cnormal() { return {normal() / std::sqrt(2.0), normal() / std::sqrt(2.0)}; }

double SeedStream::exponential(double mean)
{
    double u = 0.0;
    do
    {
        u = uniform();
    } while (u <= 0.0);
    return -mean * std::log(u);
}

double SeedStream::laplace(double std_dev)
{
    const double b = std_dev / std::sqrt(2.0);
    const double u = uniform() - 0.5;
    const double mag = -b * std::log(1.0 - 2.0 * std::abs(u));
    return u < 0.0 ? -mag : mag;
}

double SeedStream::truncated_laplace(double std_dev, double bound_in_stds)
{
    const double x = laplace(std_dev);
    const double bound = bound_in_stds * std_dev;
    return std::clamp(x, -bound, bound);
}

} // namespace dsce
