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

#include <catch2/catch_amalgamated.hpp>

#include "dsce/rng.hpp"
#include "dsce/spectrum.hpp"

using namespace dsce;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

// Rank-2 channel whose columns are combinations of one cluster response.
arma::cx_mat cluster_channel(const ArrayConfig &array, double theta, double phi, SeedStream &rng)
{
    const arma::cx_vec b = fd_response(theta, phi, array, Link::ul);
    arma::cx_mat h(b.n_elem, 2);
    h.col(0) = b * rng.cnormal();
    h.col(1) = b * rng.cnormal();
    return h;
}

} // namespace

TEST_CASE("capon peaks at the true grid cell for an on-grid cluster")
{
    const ArrayConfig array;
    const FdCodebook book = build_fd_codebook(array, 120, 4, Link::ul);
    SeedStream rng(31);
    for (int trial = 0; trial < 25; ++trial)
    {
        const int q_true = static_cast<int>(rng.uniform(0.0, 120.0));
        const int u_true = static_cast<int>(rng.uniform(0.0, 4.0));
        SeedStream draw = rng.split(static_cast<std::uint64_t>(trial));
        const arma::cx_mat h =
            cluster_channel(array, book.theta_deg(q_true), book.phi_deg(u_true), draw);
        const SpatialSpectrum spec = capon_spectrum(h, book, 1e-3);

        // Scan oracle: brute-force the argmax over all cells.
        arma::uword best_q = 0, best_u = 0;
        double best = -1.0;
        for (arma::uword u = 0; u < spec.values.n_cols; ++u)
            for (arma::uword q = 0; q < spec.values.n_rows; ++q)
                if (spec.values(q, u) > best)
                {
                    best = spec.values(q, u);
                    best_q = q;
                    best_u = u;
                }
        REQUIRE(static_cast<int>(best_q) == q_true);
        REQUIRE(static_cast<int>(best_u) == u_true);
    }
}

TEST_CASE("zero channel gives a flat spectrum at the loading value")
{
    const ArrayConfig array;
    const FdCodebook book = build_fd_codebook(array, 16, 2, Link::ul, {}, false);
    const arma::cx_mat h(64, 2, arma::fill::zeros);
    const SpatialSpectrum spec = capon_spectrum(h, book, 0.5);
    for (const double v : spec.values)
        REQUIRE_THAT(v, WithinRel(0.5, 1e-10));
}

TEST_CASE("two well-separated clusters give two local maxima near truth")
{
    const ArrayConfig array;
    const FdCodebook book = build_fd_codebook(array, 120, 1, Link::ul, {}, false);
    SeedStream rng(32);
    const int q1 = 20, q2 = 90;
    const arma::cx_vec b1 = fd_response(book.theta_deg(q1), 90.0, array, Link::ul);
    const arma::cx_vec b2 = fd_response(book.theta_deg(q2), 90.0, array, Link::ul);
    arma::cx_mat h(64, 2);
    h.col(0) = b1;
    h.col(1) = b2;
    const SpatialSpectrum spec = capon_spectrum(h, book, 1e-3);

    // Scan for local maxima.
    std::vector<int> peaks;
    for (int q = 1; q + 1 < 120; ++q)
        if (spec.values(q, 0) > spec.values(q - 1, 0) && spec.values(q, 0) > spec.values(q + 1, 0))
            peaks.push_back(q);
    bool near1 = false, near2 = false;
    for (int p : peaks)
    {
        near1 = near1 || std::abs(p - q1) <= 1;
        near2 = near2 || std::abs(p - q2) <= 1;
    }
    REQUIRE(near1);
    REQUIRE(near2);
}

TEST_CASE("rank-deficient covariance with zero loading raises the singular error")
{
    const ArrayConfig array;
    const FdCodebook book = build_fd_codebook(array, 8, 1, Link::ul, {}, false);
    SeedStream rng(33);
    const arma::cx_mat h = cluster_channel(array, 90.0, 90.0, rng);
    REQUIRE_THROWS_AS(capon_spectrum(h, book, 0.0), SingularMatrixError);
}

TEST_CASE("capon scale covariance and argmax invariance")
{
    const ArrayConfig array;
    const FdCodebook book = build_fd_codebook(array, 48, 4, Link::ul, {}, false);
    SeedStream rng(34);
    const arma::cx_mat h = cluster_channel(array, 75.0, 80.0, rng);
    const cx c(1.7, -0.4);
    const double mag2 = std::norm(c);

    const SpatialSpectrum base = capon_spectrum(h, book, 2e-3);
    const SpatialSpectrum scaled = capon_spectrum(arma::cx_mat(c * h), book, 2e-3 * mag2);
    REQUIRE(arma::norm(arma::vectorise(scaled.values - mag2 * base.values), 2) <
            1e-12 * arma::norm(arma::vectorise(base.values), 2));
    REQUIRE(base.values.index_max() == scaled.values.index_max());
}

TEST_CASE("dft cluster samples of a flat phase profile hit one bin")
{
    const arma::cx_vec s = dft_cluster_samples(cx(1.0, 0.0), 90.0, 0.5, 8); // cos(90) = 0
    REQUIRE_THAT(std::abs(s(0)), WithinAbs(8.0, 1e-10));
    for (int b = 1; b < 8; ++b)
        REQUIRE_THAT(std::abs(s(static_cast<arma::uword>(b))), WithinAbs(0.0, 1e-10));
}

TEST_CASE("zero gain gives the zero DFT vector and zero closed form")
{
    const arma::cx_vec s = dft_cluster_samples(cx(0.0, 0.0), 40.0, 0.5, 16);
    REQUIRE(arma::norm(s, 2) == 0.0);
    REQUIRE(dirichlet_magnitude(cx(0.0, 0.0), 40.0, 0.5, 16, 3) == 0.0);
}

TEST_CASE("dirichlet closed form matches the DFT magnitude on random cases")
{
    SeedStream rng(35);
    for (int i = 0; i < 100; ++i)
    {
        const cx g(rng.normal(), rng.normal());
        const double phi = rng.uniform(0.0, 180.0);
        const double delta = rng.uniform(0.25, 1.0);
        const int n_t = 1 + static_cast<int>(rng.uniform(0.0, 64.0));
        const int b = static_cast<int>(rng.uniform(0.0, static_cast<double>(n_t)));
        const arma::cx_vec s = dft_cluster_samples(g, phi, delta, n_t);
        const double closed = dirichlet_magnitude(g, phi, delta, n_t, b);
        const double direct = std::abs(s(static_cast<arma::uword>(b)));
        REQUIRE_THAT(direct, WithinAbs(closed, 1e-9 * std::max(1.0, closed)));
    }
}

TEST_CASE("dirichlet singular bin returns |g| n_t")
{
    REQUIRE_THAT(dirichlet_magnitude(cx(0.0, 2.0), 90.0, 0.5, 12, 0), WithinAbs(24.0, 1e-12));
    REQUIRE_THROWS_AS(dirichlet_magnitude(cx(1.0, 0.0), 90.0, 0.5, 12, 12), std::invalid_argument);
}

TEST_CASE("spectra correlation basics")
{
    SpatialSpectrum a;
    a.theta_deg = {1, 2, 3};
    a.phi_deg = {1};
    a.values = arma::mat{{1.0}, {2.0}, {4.0}};

    REQUIRE_THAT(spectra_correlation(a, a), WithinAbs(1.0, 1e-12));

    SpatialSpectrum mirrored = a;
    const double mean = arma::mean(arma::vectorise(a.values));
    mirrored.values = -a.values + 2.0 * mean;
    REQUIRE_THAT(spectra_correlation(a, mirrored), WithinAbs(-1.0, 1e-12));
}

TEST_CASE("spectra correlation is symmetric and affine invariant")
{
    SeedStream rng(36);
    SpatialSpectrum a, b;
    a.values.set_size(10, 3);
    b.values.set_size(10, 3);
    for (auto &v : a.values)
        v = rng.uniform(0.0, 5.0);
    for (auto &v : b.values)
        v = rng.uniform(0.0, 5.0);

    const double r1 = spectra_correlation(a, b);
    REQUIRE_THAT(spectra_correlation(b, a), WithinAbs(r1, 1e-13));

    SpatialSpectrum scaled = a;
    scaled.values = 3.5 * a.values + 2.0;
    REQUIRE_THAT(spectra_correlation(scaled, b), WithinAbs(r1, 1e-12));
}

TEST_CASE("zero-variance spectrum has undefined correlation")
{
    SpatialSpectrum a, flat;
    a.values = arma::mat{{1.0}, {2.0}};
    flat.values = arma::mat{{3.0}, {3.0}};
    REQUIRE_THROWS_AS(spectra_correlation(a, flat), std::domain_error);
    SpatialSpectrum mismatched;
    mismatched.values = arma::mat{{1.0, 2.0}};
    REQUIRE_THROWS_AS(spectra_correlation(a, mismatched), std::invalid_argument);
}

TEST_CASE("ecdf evaluation matches the defining fractions")
{
    const EcdfTable t = ecdf({1.0, 2.0, 3.0});
    REQUIRE_THAT(t.eval(2.0), WithinAbs(2.0 / 3.0, 1e-15));
    const EcdfTable single = ecdf({5.0});
    REQUIRE(single.eval(4.9) == 0.0);
    REQUIRE(single.eval(5.0) == 1.0);
    REQUIRE_THROWS_AS(ecdf({}), std::invalid_argument);
    REQUIRE(t.probs(0) > 0.0);
    REQUIRE(t.probs(t.probs.n_elem - 1) == 1.0);
}

TEST_CASE("ecdf of standard normal draws is half at zero")
{
    SeedStream rng(37);
    std::vector<double> samples(10000);
    for (double &v : samples)
        v = rng.normal();
    const EcdfTable t = ecdf(samples);
    REQUIRE_THAT(t.eval(0.0), WithinAbs(0.5, 0.02));
}
