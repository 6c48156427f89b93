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

#include "dsce/link.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

namespace dsce
{

arma::cx_mat zf_precoder(const arma::cx_mat &h_stack)
{
    if (h_stack.n_rows > h_stack.n_cols)
        throw std::invalid_argument("zf_precoder: more streams than transmit antennas");

    const arma::cx_mat gram = h_stack * h_stack.t();
    arma::cx_mat chol_u;
    if (!arma::chol(chol_u, gram))
        throw SingularMatrixError("zf_precoder: rank-deficient channel stack");

    arma::cx_mat v =
        h_stack.t() * arma::solve(arma::trimatu(chol_u),
                                  arma::solve(arma::trimatl(chol_u.t()),
                                              arma::cx_mat(arma::eye<arma::cx_mat>(
                                                  gram.n_rows, gram.n_cols))));
    for (arma::uword c = 0; c < v.n_cols; ++c)
        v.col(c) /= arma::norm(v.col(c), 2);
    return v;
}

namespace
{

// Pseudo-inverse fallback used by the sweep runner when codeword-feedback
// estimators hand ZF a rank-deficient stack (two users on the same word);
// the collision then shows up as interference instead of an abort.
arma::cx_mat zf_precoder_tolerant(const arma::cx_mat &h_stack)
{
    try
    {
        return zf_precoder(h_stack);
    }
    catch (const SingularMatrixError &)
    {
        arma::cx_mat v = arma::pinv(h_stack);
        for (arma::uword c = 0; c < v.n_cols; ++c)
        {
            const double norm = arma::norm(v.col(c), 2);
            if (norm > 0.0)
                v.col(c) /= norm;
        }
        return v;
    }
}

} // namespace

std::vector<double> user_sinr(const std::vector<arma::cx_mat> &user_channels,
                              const arma::cx_mat &v, double power, double noise_var)
{
    const std::size_t k_users = user_channels.size();
    if (k_users == 0)
        return {};
    const arma::uword d = user_channels.front().n_rows;
    if (v.n_cols != k_users * d)
        throw std::invalid_argument("user_sinr: precoder columns do not match K*d streams");

    const double stream_power = power / static_cast<double>(d);
    std::vector<double> sinrs;
    sinrs.reserve(k_users * d);
    for (std::size_t k = 0; k < k_users; ++k)
    {
        if (user_channels[k].n_rows != d || user_channels[k].n_cols != v.n_rows)
            throw std::invalid_argument("user_sinr: channel shape mismatch");
        const arma::cx_mat eff = user_channels[k] * v; // d x (K*d)
        for (arma::uword s = 0; s < d; ++s)
        {
            const arma::uword col = static_cast<arma::uword>(k) * d + s;
            const double desired = std::norm(eff(s, col)) * stream_power;
            double interference = 0.0;
            for (arma::uword j = 0; j < eff.n_cols; ++j)
                if (j != col)
                    interference += std::norm(eff(s, j)) * stream_power;
            const double sinr = desired / (interference + noise_var);
            sinrs.push_back(std::min(sinr, kSinrCap));
        }
    }
    return sinrs;
}

double sum_spectral_efficiency(const std::vector<double> &sinrs)
{
    double se = 0.0;
    for (double sinr : sinrs)
    {
        if (sinr < 0.0)
            throw std::invalid_argument("sum_spectral_efficiency: negative SINR");
        se += std::log2(1.0 + sinr);
    }
    return se;
}

arma::cx_mat inject_ul_error(const arma::cx_mat &h_ul, double sigma2, SeedStream &rng)
{
    if (sigma2 < 0.0)
        throw std::invalid_argument("inject_ul_error: sigma2 must be >= 0");
    if (sigma2 == 0.0)
        return h_ul;

    arma::cx_mat corrupted = h_ul;
    const double scale = std::sqrt(sigma2);
    for (arma::uword j = 0; j < corrupted.n_cols; ++j)
        for (arma::uword i = 0; i < corrupted.n_rows; ++i)
            corrupted(i, j) += scale * rng.cnormal();
    return corrupted;
}

void SweepConfig::validate() const
{
    scenario.validate();
    if (trials < 1)
        throw std::invalid_argument("SweepConfig: trials must be >= 1");
    if (snr_grid_db.empty())
        throw std::invalid_argument("SweepConfig: SNR grid must be non-empty");
    if (estimators.empty())
        throw std::invalid_argument("SweepConfig: estimator list must be non-empty");
    static const std::set<std::string> known{"perfect", "dsce", "ecsirs", "kp", "fmmsce2d", "rvq2d"};
    for (const std::string &e : estimators)
        if (known.find(e) == known.end())
            throw std::invalid_argument("SweepConfig: unknown estimator '" + e + "'");
    if (sweep_variable == SweepVariable::array_size)
    {
        if (array_points.empty())
            throw std::invalid_argument("SweepConfig: array sweep without array points");
    }
    else if (sweep_variable != SweepVariable::none && sweep_points.empty())
    {
        throw std::invalid_argument("SweepConfig: sweep without sweep points");
    }
    if (d_streams_need_full_channel() && scenario.d_streams > 1)
        throw std::invalid_argument(
            "SweepConfig: codeword-feedback estimators support d_streams = 1 only");
}

bool SweepConfig::d_streams_need_full_channel() const
{
    for (const std::string &e : estimators)
        if (e == "ecsirs" || e == "kp" || e == "rvq2d")
            return true;
    return false;
}

const SeCell *SeResult::find(const std::string &estimator, const std::string &label,
                             double snr_db) const
{
    for (const SeCell &cell : cells)
        if (cell.estimator == estimator && cell.sweep_label == label && cell.snr_db == snr_db)
            return &cell;
    return nullptr;
}

namespace
{

// Deterministic parallel for: each index writes only its own slots.
void parallel_for(int count, int threads, const std::function<void(int)> &body)
{
    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, count));
    if (n_threads == 1)
    {
        for (int i = 0; i < count; ++i)
            body(i);
        return;
    }

    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;)
        {
            const int i = next.fetch_add(1);
            if (i >= count)
                return;
            try
            {
                body(i);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back(worker);
    for (std::thread &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

struct SweepPoint
{
    std::string label;
    ScenarioConfig scenario;
    DsceConfig dsce;
    double ul_error_var = 0.0;
};

std::vector<SweepPoint> expand_points(const SweepConfig &config)
{
    std::vector<SweepPoint> points;
    const auto base = SweepPoint{"-", config.scenario, config.dsce, 0.0};
    switch (config.sweep_variable)
    {
    case SweepVariable::none:
        points.push_back(base);
        break;
    case SweepVariable::q:
        for (double qv : config.sweep_points)
        {
            SweepPoint p = base;
            p.dsce.q = static_cast<int>(qv);
            p.label = std::to_string(static_cast<int>(qv));
            points.push_back(p);
        }
        break;
    case SweepVariable::u:
        for (double uv : config.sweep_points)
        {
            SweepPoint p = base;
            p.dsce.u = static_cast<int>(uv);
            p.label = std::to_string(static_cast<int>(uv));
            points.push_back(p);
        }
        break;
    case SweepVariable::ul_error_var:
        for (double sv : config.sweep_points)
        {
            SweepPoint p = base;
            p.ul_error_var = sv;
            if (config.couple_mmse_to_ul_error)
                p.dsce.mmse_noise_var += sv * config.scenario.array.n_t();
            char label[32];
            std::snprintf(label, sizeof(label), "%g", sv);
            p.label = label;
            points.push_back(p);
        }
        break;
    case SweepVariable::array_size:
        for (const ArraySize &a : config.array_points)
        {
            SweepPoint p = base;
            p.scenario.array.n_h = a.n_h;
            p.scenario.array.n_v = a.n_v;
            p.label = std::to_string(a.n_h) + "x" + std::to_string(a.n_v);
            points.push_back(p);
        }
        break;
    }
    return points;
}

// Immutable per-point context shared across trials.
struct PointContext
{
    SweepPoint point;
    FdCodebook ul_book;       // Q x U spectrum codebook
    FdCodebook ul_book_2d;    // Q x 1 (FMMSCE)
    FdCodebook ecsirs_j;      // DL CSI-RS span
    QuantizerCodebook ecsirs_t;
    QuantizerCodebook kp_book;
    QuantizerCodebook rvq_book;
    bool needs_dsce = false, needs_fmmsce = false, needs_ecsirs = false, needs_kp = false,
         needs_rvq = false;
};

PointContext make_context(const SweepConfig &config, const SweepPoint &point)
{
    PointContext ctx;
    ctx.point = point;
    const ArrayConfig &array = point.scenario.array;
    const Sector &sector = point.scenario.sector;

    for (const std::string &e : config.estimators)
    {
        if (e == "dsce")
            ctx.needs_dsce = true;
        else if (e == "fmmsce2d")
            ctx.needs_fmmsce = true;
        else if (e == "ecsirs")
            ctx.needs_ecsirs = true;
        else if (e == "kp")
            ctx.needs_kp = true;
        else if (e == "rvq2d")
            ctx.needs_rvq = true;
    }

    if (ctx.needs_dsce)
        ctx.ul_book = build_fd_codebook(array, point.dsce.q, point.dsce.u, Link::ul, sector,
                                        /*warn_dof=*/false);
    if (ctx.needs_fmmsce)
        ctx.ul_book_2d = build_fd_codebook(array, point.dsce.q, 1, Link::ul, sector,
                                           /*warn_dof=*/false);
    if (ctx.needs_ecsirs)
    {
        if (config.ecsirs_l == array.n_t())
        {
            // Full unitary DFT span: J J^H = I, the spec'd L = n_t case.
            ctx.ecsirs_j = build_fd_codebook(
                array, dft_grid_angles(array.n_h, array.delta_h * array.spacing_scale(Link::dl)),
                dft_grid_angles(array.n_v, array.delta_v * array.spacing_scale(Link::dl)), Link::dl,
                /*warn_dof=*/false);
        }
        else
        {
            // Coarse sector grid with L = l_az * u words.
            const int l_az = std::max(1, config.ecsirs_l / point.dsce.u);
            ctx.ecsirs_j = build_fd_codebook(array, l_az, point.dsce.u, Link::dl, sector,
                                             /*warn_dof=*/false);
        }
        const int n_words = 1 << config.ecsirs_bits;
        const int n_az = std::max(1, n_words / point.dsce.u);
        const FdCodebook grid = build_fd_codebook(array, n_az, point.dsce.u, Link::dl, sector,
                                                  /*warn_dof=*/false);
        ctx.ecsirs_t.words = grid.words;
        ctx.ecsirs_t.bits = config.ecsirs_bits;
        ctx.ecsirs_t.origin = CodebookOrigin::dft;
    }
    if (ctx.needs_kp)
        ctx.kp_book = kp_codebook(array.n_h, array.n_v, config.kp_t_count,
                                  kp_elevation_grid(config.kp_elevation_words), array, Link::dl);
    if (ctx.needs_rvq)
    {
        SeedStream rvq_rng = SeedStream(config.seed).split(0x52565132ull); // independent of trials
        ctx.rvq_book = rvq_codebook(config.rvq_bits, array, rvq_rng);
    }
    return ctx;
}

} // namespace

SeResult run_sweep(const SweepConfig &config)
{
    config.validate();

    // The perfect-CSIT reference is always evaluated.
    std::vector<std::string> estimators = config.estimators;
    if (std::find(estimators.begin(), estimators.end(), "perfect") == estimators.end())
        estimators.insert(estimators.begin(), "perfect");

    const std::vector<SweepPoint> points = expand_points(config);
    const std::size_t n_est = estimators.size();
    const std::size_t n_snr = config.snr_grid_db.size();
    const std::size_t n_trials = static_cast<std::size_t>(config.trials);

    SeResult result;
    for (const SweepPoint &point : points)
    {
        const PointContext ctx = make_context(config, point);
        const ScenarioConfig &scen = ctx.point.scenario;
        const int d = scen.d_streams;

        // se[est][snr](trial)
        std::vector<std::vector<arma::vec>> se(n_est,
                                               std::vector<arma::vec>(n_snr, arma::vec(n_trials)));

        parallel_for(config.trials, config.threads, [&](int trial) {
            SeedStream trial_stream = SeedStream(config.seed).split(static_cast<std::uint64_t>(trial));

            std::vector<arma::cx_mat> true_rows(static_cast<std::size_t>(scen.k_users));
            std::vector<arma::cx_mat> h_ul_obs(static_cast<std::size_t>(scen.k_users));
            std::vector<arma::cx_mat> h_dl(static_cast<std::size_t>(scen.k_users));
            for (int k = 0; k < scen.k_users; ++k)
            {
                SeedStream user_stream = trial_stream.split(0x1000ull + static_cast<std::uint64_t>(k));
                const ClusterSet clusters = draw_clusters(scen, user_stream);
                const ChannelPair pair = realize_channel_pair(clusters, scen, user_stream);
                h_dl[static_cast<std::size_t>(k)] = pair.h_dl;
                true_rows[static_cast<std::size_t>(k)] =
                    pair.h_dl.rows(0, static_cast<arma::uword>(d - 1));

                SeedStream err_stream = trial_stream.split(0x2000ull + static_cast<std::uint64_t>(k));
                h_ul_obs[static_cast<std::size_t>(k)] =
                    inject_ul_error(pair.h_ul, ctx.point.ul_error_var, err_stream);
            }

            for (std::size_t e = 0; e < n_est; ++e)
            {
                const std::string &name = estimators[e];
                arma::cx_mat stack(static_cast<arma::uword>(scen.k_users * d),
                                   static_cast<arma::uword>(scen.array.n_t()));
                for (int k = 0; k < scen.k_users; ++k)
                {
                    arma::cx_mat rows;
                    const std::size_t ki = static_cast<std::size_t>(k);
                    if (name == "perfect")
                    {
                        rows = true_rows[ki];
                    }
                    else if (name == "dsce")
                    {
                        const DsceReport rep =
                            run_dsce(h_ul_obs[ki], nullptr, ctx.ul_book, ctx.point.dsce);
                        rows = rep.h2.rows(0, static_cast<arma::uword>(d - 1));
                    }
                    else if (name == "fmmsce2d")
                    {
                        const DsceReport rep =
                            fmmsce2d_run(h_ul_obs[ki], ctx.ul_book_2d, ctx.point.dsce);
                        rows = rep.h2.rows(0, static_cast<arma::uword>(d - 1));
                    }
                    else if (name == "ecsirs")
                    {
                        rows = ecsirs_run(h_dl[ki], ctx.ecsirs_j, ctx.ecsirs_t).h_hat;
                    }
                    else if (name == "kp")
                    {
                        rows = quantize_select(h_dl[ki], ctx.kp_book).h_hat;
                    }
                    else // rvq2d
                    {
                        rows = quantize_select(h_dl[ki], ctx.rvq_book).h_hat;
                    }
                    stack.rows(static_cast<arma::uword>(k * d),
                               static_cast<arma::uword>(k * d + d - 1)) = rows;
                }

                const arma::cx_mat v = zf_precoder_tolerant(stack);
                for (std::size_t s = 0; s < n_snr; ++s)
                {
                    const double power = std::pow(10.0, config.snr_grid_db[s] / 10.0);
                    const std::vector<double> sinrs = user_sinr(true_rows, v, power, 1.0);
                    se[e][s](static_cast<arma::uword>(trial)) = sum_spectral_efficiency(sinrs);
                }
            }
        });

        for (std::size_t e = 0; e < n_est; ++e)
            for (std::size_t s = 0; s < n_snr; ++s)
            {
                SeCell cell;
                cell.estimator = estimators[e];
                cell.sweep_label = point.label;
                cell.snr_db = config.snr_grid_db[s];
                cell.trials = config.trials;
                cell.trial_se = se[e][s];
                cell.mean_se = arma::mean(cell.trial_se);
                cell.std_error = config.trials > 1
                                     ? arma::stddev(cell.trial_se) / std::sqrt(n_trials)
                                     : 0.0;
                result.cells.push_back(std::move(cell));
            }
    }
    return result;
}

std::map<double, EcdfTable> correlation_experiment(const ScenarioConfig &scenario,
                                                   const std::vector<double> &omega_list_hz,
                                                   int trials, std::uint64_t seed, int q, int u,
                                                   int threads)
{
    scenario.validate();
    if (trials < 1)
        throw std::invalid_argument("correlation_experiment: trials must be >= 1");
    if (omega_list_hz.empty())
        throw std::invalid_argument("correlation_experiment: empty band-gap list");

    struct OmegaContext
    {
        ScenarioConfig scen;
        FdCodebook ul_book;
        FdCodebook dl_book;
    };
    std::vector<OmegaContext> contexts;
    contexts.reserve(omega_list_hz.size());
    for (double omega : omega_list_hz)
    {
        OmegaContext ctx;
        ctx.scen = scenario;
        ctx.scen.array.f_dl_hz = scenario.array.f_ul_hz + omega;
        ctx.ul_book =
            build_fd_codebook(ctx.scen.array, q, u, Link::ul, ctx.scen.sector, /*warn_dof=*/false);
        ctx.dl_book =
            build_fd_codebook(ctx.scen.array, q, u, Link::dl, ctx.scen.sector, /*warn_dof=*/false);
        contexts.push_back(std::move(ctx));
    }

    std::vector<arma::vec> rho(omega_list_hz.size(),
                               arma::vec(static_cast<arma::uword>(trials)));
    parallel_for(trials, threads, [&](int trial) {
        for (std::size_t o = 0; o < contexts.size(); ++o)
        {
            // Same per-trial stream for every band gap: the geometry is
            // shared and only frequency terms differ (paired comparison).
            SeedStream stream = SeedStream(seed).split(static_cast<std::uint64_t>(trial));
            const ClusterSet clusters = draw_clusters(contexts[o].scen, stream);
            const ChannelPair pair = realize_channel_pair(clusters, contexts[o].scen, stream);

            const SpatialSpectrum p_ul = capon_spectrum(pair.h_ul, contexts[o].ul_book);
            const SpatialSpectrum p_dl =
                capon_spectrum(arma::cx_mat(pair.h_dl.t()), contexts[o].dl_book);
            rho[o](static_cast<arma::uword>(trial)) = spectra_correlation(p_ul, p_dl);
        }
    });

    std::map<double, EcdfTable> tables;
    for (std::size_t o = 0; o < omega_list_hz.size(); ++o)
    {
        const std::vector<double> samples(rho[o].begin(), rho[o].end());
        tables[omega_list_hz[o]] = ecdf(samples);
    }
    return tables;
}

} // namespace dsce
