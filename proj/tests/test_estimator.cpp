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

#include "dsce/channel.hpp"
#include "dsce/estimator.hpp"

using namespace dsce;
using Catch::Matchers::WithinAbs;

namespace
{

SpatialSpectrum make_spectrum(const arma::mat &values)
{
    SpatialSpectrum spec;
    spec.values = values;
    spec.theta_deg = arma::linspace(30.5, 149.5, values.n_rows);
    spec.phi_deg = arma::linspace(50.0, 130.0, values.n_cols);
    return spec;
}

} // namespace

TEST_CASE("elevation selection takes the strongest mean-square column")
{
    arma::mat v(6, 4, arma::fill::ones);
    v.col(2) *= 3.0;
    REQUIRE(select_elevation(make_spectrum(v)) == 2);

    // Brute force on random spectra.
    SeedStream rng(41);
    for (int i = 0; i < 30; ++i)
    {
        arma::mat r(12, 5);
        for (auto &x : r)
            x = rng.uniform(0.0, 2.0);
        const SpatialSpectrum spec = make_spectrum(r);
        const int got = select_elevation(spec);
        int best = 0;
        double best_p = -1.0;
        for (int u = 0; u < 5; ++u)
        {
            const double p = arma::mean(arma::square(r.col(static_cast<arma::uword>(u))));
            if (p > best_p)
            {
                best_p = p;
                best = u;
            }
        }
        REQUIRE(got == best);
    }
}

TEST_CASE("uniform spectrum breaks the elevation tie toward index zero")
{
    REQUIRE(select_elevation(make_spectrum(arma::mat(8, 4, arma::fill::ones))) == 0);
    REQUIRE(select_elevation(make_spectrum(arma::mat(8, 1, arma::fill::ones))) == 0);
}

TEST_CASE("azimuth selection orders by power with grid-index tie-break")
{
    arma::mat v(5, 1, arma::fill::zeros);
    v(0, 0) = 1.0;
    v(1, 0) = 5.0;
    v(2, 0) = 3.0;
    v(3, 0) = 5.0;
    v(4, 0) = 0.5;
    const std::vector<int> idx = select_azimuth_indices(make_spectrum(v), 0, 5);
    REQUIRE(idx == std::vector<int>{1, 3, 2, 0, 4});

    const arma::vec angles = select_azimuth_top_nt(make_spectrum(v), 0, 3);
    const SpatialSpectrum spec = make_spectrum(v);
    REQUIRE(angles(0) == spec.theta_deg(1));
    REQUIRE(angles(1) == spec.theta_deg(3));
}

TEST_CASE("azimuth selection needs a grid at least n_t wide")
{
    REQUIRE_THROWS_AS(select_azimuth_indices(make_spectrum(arma::mat(4, 1, arma::fill::ones)), 0, 8),
                      std::invalid_argument);
}

TEST_CASE("receive matrix columns reuse the response generator bit-exactly")
{
    const ArrayConfig array;
    const arma::vec theta{40.0, 88.0, 121.5};
    const arma::cx_mat a_r = build_receive_matrix(theta, 97.0, array);
    REQUIRE(a_r.n_rows == 64);
    REQUIRE(a_r.n_cols == 3);
    for (arma::uword n = 0; n < 3; ++n)
    {
        const arma::cx_vec expected = fd_response(theta(n), 97.0, array, Link::ul);
        REQUIRE(arma::norm(a_r.col(n) - expected, 2) == 0.0);
        REQUIRE_THAT(arma::norm(a_r.col(n), 2), WithinAbs(8.0, 1e-10));
    }
}

TEST_CASE("receive matrix trivial cases")
{
    ArrayConfig tiny;
    tiny.n_h = 1;
    tiny.n_v = 1;
    const arma::cx_mat a1 = build_receive_matrix(arma::vec{90.0}, 90.0, tiny);
    REQUIRE(a1.n_elem == 1);
    REQUIRE(a1(0, 0) == cx(1.0, 0.0));

    const ArrayConfig array;
    const arma::cx_mat broadside = build_receive_matrix(arma::vec{90.0, 90.0}, 90.0, array);
    for (const cx &v : broadside)
        REQUIRE_THAT(std::abs(v - cx(1.0, 0.0)), WithinAbs(0.0, 1e-12));
}

TEST_CASE("zero band gap leaves both rotation modes at the identity")
{
    ArrayConfig array;
    array.f_dl_hz = array.f_ul_hz;
    const arma::vec theta{40.0, 75.0, 140.0};
    const arma::cx_mat a_r = build_receive_matrix(theta, 80.0, array);
    const arma::cx_mat diag = rotate_to_transmit(a_r, array, RotationMode::paper_diagonal, theta, 80.0);
    const arma::cx_mat regen =
        rotate_to_transmit(a_r, array, RotationMode::regenerate_at_dl, theta, 80.0);
    REQUIRE(arma::norm(arma::vectorise(diag - a_r), 2) == 0.0);
    REQUIRE(arma::norm(arma::vectorise(regen - a_r), 2) == 0.0);
}

TEST_CASE("paper-diagonal rotation applies the per-element phase ramp")
{
    const ArrayConfig array; // ratio 1.1
    const arma::vec theta{100.0};
    const arma::cx_mat a_r = build_receive_matrix(theta, 90.0, array);
    const arma::cx_mat a_t =
        rotate_to_transmit(a_r, array, RotationMode::paper_diagonal, theta, 90.0);
    for (arma::uword n = 0; n < a_r.n_rows; ++n)
    {
        const cx ramp = std::polar(1.0, -2.0 * pi * std::remainder(1.1 * double(n), 1.0));
        REQUIRE_THAT(std::abs(a_t(n, 0) - ramp * a_r(n, 0)), WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("regenerated transmit response aligns with the true DL response")
{
    const ArrayConfig array;
    const FdCodebook book = build_fd_codebook(array, 120, 4, Link::ul);
    // A single path exactly on a grid cell.
    const int q_true = 64, u_true = 2;
    const double theta = book.theta_deg(q_true);
    const double phi = book.phi_deg(u_true);
    const arma::cx_mat a_r = build_receive_matrix(arma::vec{theta}, phi, array);
    const arma::cx_mat a_t =
        rotate_to_transmit(a_r, array, RotationMode::regenerate_at_dl, arma::vec{theta}, phi);
    const arma::cx_vec true_dl = fd_response(theta, phi, array, Link::dl);
    const double align = std::abs(arma::cdot(a_t.col(0), true_dl)) / 64.0;
    REQUIRE_THAT(align, WithinAbs(1.0, 1e-12));
    // Against a half-cell-offset direction the alignment drops but stays near.
    const double off = std::abs(arma::cdot(
                           a_t.col(0), fd_response(theta + 0.5, phi, array, Link::dl))) /
                       64.0;
    REQUIRE(off >= std::cos(deg2rad(10.0)));
    REQUIRE(off < 1.0);
}

TEST_CASE("rough estimate is the plain product with oracle check")
{
    SeedStream rng(42);
    arma::cx_mat h(6, 2), a(6, 6);
    for (auto &v : h)
        v = rng.cnormal();
    for (auto &v : a)
        v = rng.cnormal();

    const arma::cx_mat h1 = rough_estimate(h, a);
    REQUIRE(arma::norm(arma::vectorise(rough_estimate(h, arma::cx_mat(arma::eye<arma::cx_mat>(6, 6))) -
                                        h.t()),
                       2) < 1e-14);
    REQUIRE(arma::norm(arma::vectorise(rough_estimate(arma::cx_mat(6, 2, arma::fill::zeros), a)), 2) ==
            0.0);

    // Naive triple loop.
    arma::cx_mat expected(2, 6, arma::fill::zeros);
    for (arma::uword i = 0; i < 2; ++i)
        for (arma::uword j = 0; j < 6; ++j)
            for (arma::uword k = 0; k < 6; ++k)
                expected(i, j) += std::conj(h(k, i)) * a(k, j);
    REQUIRE(arma::norm(arma::vectorise(h1 - expected), 2) < 1e-12);

    REQUIRE_THROWS_AS(rough_estimate(h, arma::cx_mat(5, 5, arma::fill::ones)),
                      std::invalid_argument);
}

TEST_CASE("mmse refinement scalar case")
{
    const arma::cx_mat h(1, 1, arma::fill::ones);
    const arma::cx_mat a(1, 1, arma::fill::ones);
    const double sigma2 = 0.25;
    const MmseResult res = mmse_refine(h, a, a, sigma2);
    REQUIRE_THAT(std::abs(res.g(0, 0) - cx(0.8, 0.0)), WithinAbs(0.0, 1e-12));  // 1/(1+0.25)
    REQUIRE_THAT(std::abs(res.h2(0, 0) - cx(0.8, 0.0)), WithinAbs(0.0, 1e-12));
}

TEST_CASE("mmse refinement vanishes as the regularizer dominates")
{
    SeedStream rng(43);
    arma::cx_mat h(8, 2), a(8, 8);
    for (auto &v : h)
        v = rng.cnormal();
    for (auto &v : a)
        v = rng.cnormal();
    const MmseResult res = mmse_refine(h, a, a, 1e9);
    REQUIRE(arma::norm(arma::vectorise(res.g), 2) < 1e-6);
    REQUIRE(arma::norm(arma::vectorise(res.h2), 2) < 1e-4);
}

TEST_CASE("mmse refinement rejects a singular gram at sigma2 = 0")
{
    const ArrayConfig array;
    // 64 selected directions at one elevation: gram rank <= n_h < 64.
    const arma::vec theta = arma::linspace(31.0, 149.0, 64);
    const arma::cx_mat a_r = build_receive_matrix(theta, 90.0, array);
    arma::cx_mat h(64, 2, arma::fill::ones);
    REQUIRE_THROWS_AS(mmse_refine(h, a_r, a_r, 0.0), SingularMatrixError);
}

TEST_CASE("mmse refinement matches an independent least-squares minimizer")
{
    // Oracle: minimize J(C) = ||C A_R^H - H_ul^H||_F^2 + sigma2 ||C||_F^2 by
    // conjugate gradient on the normal equations, then compare C A_T^H.
    SeedStream rng(44);
    const int n_t = 12, m_r = 2, k = 12;
    arma::cx_mat h(n_t, m_r), a_r(n_t, k), a_t(n_t, k);
    for (auto &v : h)
        v = rng.cnormal();
    for (auto &v : a_r)
        v = rng.cnormal();
    for (auto &v : a_t)
        v = rng.cnormal();
    const double sigma2 = 0.3;

    const MmseResult res = mmse_refine(h, a_r, a_t, sigma2);

    // CG solve of (A_R^H A_R + sigma2 I) X = A_R^H for each row of C:
    // C = H_ul^H A_R (gram + sigma2 I)^{-1}  <=>  C (gram + s I) = H_ul^H A_R.
    const arma::cx_mat gram = a_r.t() * a_r + sigma2 * arma::eye<arma::cx_mat>(k, k);
    const arma::cx_mat rhs = h.t() * a_r; // m_r x k
    arma::cx_mat c(m_r, k, arma::fill::zeros);
    for (int row = 0; row < m_r; ++row)
    {
        arma::cx_vec x(k, arma::fill::zeros);
        arma::cx_vec r = rhs.row(row).st();
        arma::cx_vec p = r;
        double rs = std::real(arma::cdot(r, r));
        for (int it = 0; it < 400 && rs > 1e-26; ++it)
        {
            const arma::cx_vec gp = gram.st() * p;
            const cx alpha = rs / arma::cdot(p, gp);
            x += alpha * p;
            r -= alpha * gp;
            const double rs_new = std::real(arma::cdot(r, r));
            p = r + (rs_new / rs) * p;
            rs = rs_new;
        }
        c.row(row) = x.st();
    }
    const arma::cx_mat h2_oracle = c * a_t.t();
    REQUIRE(arma::norm(arma::vectorise(res.h2 - h2_oracle), 2) <
            1e-8 * arma::norm(arma::vectorise(h2_oracle), 2));

    // First-order stationarity: any perturbation of the fitted coefficients
    // increases the objective.
    const arma::cx_mat c_hat = h.t() * res.g;
    const auto objective = [&](const arma::cx_mat &cc) {
        return std::pow(arma::norm(arma::vectorise(cc * a_r.t() - h.t()), 2), 2) +
               sigma2 * std::pow(arma::norm(arma::vectorise(cc), 2), 2);
    };
    const double at_min = objective(c_hat);
    for (int i = 0; i < 10; ++i)
    {
        arma::cx_mat delta(m_r, k);
        for (auto &v : delta)
            v = 1e-3 * rng.cnormal();
        REQUIRE(objective(c_hat + delta) > at_min);
    }
}

TEST_CASE("pipeline report keeps its selection contract and determinism")
{
    const ScenarioConfig scen;
    SeedStream s(45);
    const ClusterSet set = draw_clusters(scen, s);
    const ChannelPair pair = realize_channel_pair(set, scen, s);
    const FdCodebook book = build_fd_codebook(scen.array, 120, 4, Link::ul);
    DsceConfig config;

    const DsceReport a = run_dsce(pair.h_ul, &pair.h_dl, book, config);
    REQUIRE(a.theta_idx.size() == 64);
    REQUIRE(a.theta_hat_deg.n_elem == 64);
    REQUIRE(a.h2.n_rows == 2);
    REQUIRE(a.h2.n_cols == 64);
    REQUIRE(a.metrics.has_value());

    const DsceReport b = run_dsce(pair.h_ul, &pair.h_dl, book, config);
    REQUIRE(a.u_hat == b.u_hat);
    REQUIRE(a.theta_idx == b.theta_idx);
    REQUIRE(arma::norm(arma::vectorise(a.h2 - b.h2), 2) == 0.0);
}

TEST_CASE("selections are invariant to channel scaling")
{
    const ScenarioConfig scen;
    SeedStream s(46);
    const ClusterSet set = draw_clusters(scen, s);
    const ChannelPair pair = realize_channel_pair(set, scen, s);
    const FdCodebook book = build_fd_codebook(scen.array, 120, 4, Link::ul);
    DsceConfig config;

    const DsceReport base = run_dsce(pair.h_ul, nullptr, book, config);
    const DsceReport scaled =
        run_dsce(arma::cx_mat(cx(0.0, 2.5) * pair.h_ul), nullptr, book, config);
    REQUIRE(base.u_hat == scaled.u_hat);
    REQUIRE(base.theta_idx == scaled.theta_idx);
}

TEST_CASE("pipeline rejects a DL projection codebook")
{
    const ScenarioConfig scen;
    const FdCodebook book = build_fd_codebook(scen.array, 120, 4, Link::dl);
    const arma::cx_mat h(64, 2, arma::fill::ones);
    REQUIRE_THROWS_AS(run_dsce(h, nullptr, book, DsceConfig{}), std::invalid_argument);
}

TEST_CASE("refinement beats the rough estimate on paired trials")
{
    const ScenarioConfig scen;
    const FdCodebook book = build_fd_codebook(scen.array, 120, 4, Link::ul);
    DsceConfig config;
    SeedStream s(47);
    int wins = 0;
    const int trials = 30;
    for (int t = 0; t < trials; ++t)
    {
        SeedStream trial = s.split(static_cast<std::uint64_t>(t));
        const ClusterSet set = draw_clusters(scen, trial);
        const ChannelPair pair = realize_channel_pair(set, scen, trial);
        const DsceReport rep = run_dsce(pair.h_ul, &pair.h_dl, book, config);
        REQUIRE(rep.metrics.has_value());
        if (rep.metrics->rel_mse_refined <= rep.metrics->rel_mse_rough)
            ++wins;
    }
    REQUIRE(wins == trials);
}

TEST_CASE("best-codeword oracle matches a naive double loop")
{
    ArrayConfig small;
    small.n_h = 4;
    small.n_v = 2;
    const FdCodebook book = build_fd_codebook(small, 10, 3, Link::dl, {}, false);
    SeedStream rng(48);
    for (int i = 0; i < 20; ++i)
    {
        arma::cx_mat h(2, 8);
        for (auto &v : h)
            v = rng.cnormal();
        const auto [index, gain] = oracle_best_codeword(h, book);

        arma::uword naive_index = 0;
        double naive_gain = -1.0;
        for (arma::uword k = 0; k < book.words.n_cols; ++k)
        {
            double g = 0.0;
            for (arma::uword r = 0; r < h.n_rows; ++r)
            {
                cx acc = 0.0;
                for (arma::uword c = 0; c < h.n_cols; ++c)
                    acc += h(r, c) * book.words(c, k);
                g += std::norm(acc);
            }
            if (g > naive_gain)
            {
                naive_gain = g;
                naive_index = k;
            }
        }
        REQUIRE(index == naive_index);
        REQUIRE_THAT(gain, WithinAbs(naive_gain, 1e-9));
    }
}

TEST_CASE("best-codeword oracle trivial cases")
{
    ArrayConfig small;
    small.n_h = 4;
    small.n_v = 2;
    const FdCodebook book = build_fd_codebook(small, 12, 2, Link::dl, {}, false);

    // Rank-1 channel aligned with an in-codebook direction.
    const arma::uword target = book.col(7, 1);
    arma::cx_mat h(2, 8);
    h.row(0) = book.words.col(target).t();
    h.row(1) = cx(0.5, 0.5) * book.words.col(target).t();
    REQUIRE(oracle_best_codeword(h, book).first == target);

    const arma::cx_mat zero(2, 8, arma::fill::zeros);
    const auto [index, gain] = oracle_best_codeword(zero, book);
    REQUIRE(index == 0);
    REQUIRE(gain == 0.0);
}
