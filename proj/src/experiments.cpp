#include "dynloc/experiments.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

#include "dynloc/errors.hpp"
#include "dynloc/rng.hpp"

#ifndef DYNLOC_VERSION
#define DYNLOC_VERSION "unknown"
#endif

namespace dynloc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v)
{
    return format_number(v);
}

void put_fit(KeyValues& kv, const std::string& prefix, const FitResult& f)
{
    kv.emplace_back(prefix, num(f.estimate));
    kv.emplace_back(prefix + "_stderr", num(f.std_error));
    kv.emplace_back(prefix + "_r2", num(f.r2));
    kv.emplace_back(prefix + "_window", num(f.window.lo) + " " + num(f.window.hi));
}

void put_saturation(KeyValues& kv, const std::string& prefix, const SaturationStats& s)
{
    kv.emplace_back(prefix + "_mean", num(s.mean));
    kv.emplace_back(prefix + "_relative_sigma", num(s.relative_sigma));
    kv.emplace_back(prefix + "_residual_slope", num(s.residual_slope));
}

void put_tail(KeyValues& kv, const std::string& prefix, const TailFit& t)
{
    kv.emplace_back(prefix + "_rate", num(t.linear.estimate));
    kv.emplace_back(prefix + "_r2", num(t.linear.r2));
    kv.emplace_back(prefix + "_r2_quadratic", num(t.r2_quadratic));
}

GaussianCloud cloud_for(const RunConfig& config, double kbar)
{
    return matching_cloud(config.packet_x0, config.packet_p0, config.initial_packet_dx(kbar), kbar);
}

std::size_t strobe_steps(const RunConfig& config)
{
    return config.steps_per_period * config.strobe_stride;
}

// Selected columns of a series as CSV rows, with tau and SI time in front.
std::vector<double> si_time(const std::vector<double>& tau, double mirror_frequency)
{
    std::vector<double> t(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i)
        t[i] = t_of_tau(tau[i], mirror_frequency);
    return t;
}

std::vector<double> scaled(const std::vector<double>& v, double factor)
{
    std::vector<double> out(v);
    for (double& x : out)
        x *= factor;
    return out;
}

void write_distribution(ArtifactSet& art, const std::string& name, const std::string& coordinate,
                        const DistributionSnapshot& d)
{
    art.write_columns(name, {coordinate, "probability"}, {d.coordinate, d.probability});
}

void write_matrix(ArtifactSet& art, const std::string& name, const std::vector<double>& tau,
                  const BinSpec& bins, const std::vector<std::vector<double>>& rows)
{
    std::vector<std::string> header{"tau"};
    for (std::size_t i = 0; i < bins.count; ++i)
        header.push_back(fmt::format("b{}", i));
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<double> row{tau[r]};
        row.insert(row.end(), rows[r].begin(), rows[r].end());
        out.push_back(std::move(row));
    }
    art.write_csv(name, header, out);
}

template <typename F>
void parallel_points(std::size_t n, F&& body)
{
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

}  // namespace

BinSpec position_bins(const RunConfig& config)
{
    return {-config.map_x_range, config.map_x_range, config.map_bins};
}

BinSpec momentum_bins(const RunConfig& config)
{
    return {-config.map_p_range, config.map_p_range, config.map_bins};
}

BinSpec distribution_bins(const RunConfig& config)
{
    return {-config.dist_range, config.dist_range, config.dist_bins};
}

std::size_t scaled_grid_size(std::size_t n, double kbar)
{
    if (!(kbar > 0.0))
        throw ConfigError("kbar must be positive");
    const double target = static_cast<double>(n) / kbar;
    std::size_t m = 16;
    while (static_cast<double>(m) < target * (1.0 - 1e-12))
        m *= 2;
    return m;
}

KeyValues run_metadata(const RunConfig& config, double elapsed_seconds)
{
    KeyValues kv = to_key_values(config);
    kv.emplace_back("run.code_version", DYNLOC_VERSION);
    kv.emplace_back("run.wall_clock",
                    fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr))));
    kv.emplace_back("run.elapsed_seconds", fmt::format("{:.3f}", elapsed_seconds));
    kv.emplace_back("run.threads", std::to_string(omp_get_max_threads()));
    kv.emplace_back("run.tau_final", num(config.resolved_tau_final()));
    kv.emplace_back("run.dtau", num(config.dtau()));
    kv.emplace_back("run.x_scale_si", num(config.x_scale_si));
    kv.emplace_back("run.p_scale_si", num(config.p_scale_si));
    return kv;
}

PairedRun run_paired(const RunConfig& config, const EffectiveParams& params, const GridSpec& grid,
                     double tau_final, Capture capture, kernels::Backend backend)
{
    const EffectivePotential potential(params);
    const double kbar = params.kbar;
    const bool on_map = capture == Capture::every_strobe;
    const BinSpec xb = on_map ? position_bins(config) : distribution_bins(config);
    const BinSpec pb = on_map ? momentum_bins(config) : distribution_bins(config);
    const double capture_from = capture == Capture::final_fraction
                                    ? (1.0 - config.time_average_fraction) * tau_final - 1e-9
                                    : -std::numeric_limits<double>::infinity();

    PairedRun run;

    ClassicalEnsemble ens = sample_ensemble(cloud_for(config, kbar), config.ensemble_size, config.seed);
    ClassicalEvolveOptions copt;
    copt.tau_final = tau_final;
    copt.dtau = config.dtau();
    copt.stride = strobe_steps(config);
    copt.backend = backend;
    ClassicalObserver cobs;
    if (capture != Capture::none) {
        cobs = [&](const ClassicalEnsemble& e) {
            if (e.tau < capture_from)
                return;
            run.snapshot_tau.push_back(e.tau);
            run.classical_x.push_back(distribution(e, Axis::position, xb));
            run.classical_p.push_back(distribution(e, Axis::momentum, pb));
        };
    }
    run.classical = evolve(ens, potential, copt, cobs);

    const Grid g(grid.x_min, grid.x_max, grid.n, kbar);
    WavePacket packet =
        gaussian_packet(g, config.packet_x0, config.packet_p0, config.initial_packet_dx(kbar));
    QuantumEvolveOptions qopt;
    qopt.tau_final = tau_final;
    qopt.dtau = config.dtau();
    qopt.stride = strobe_steps(config);
    qopt.backend = backend;
    QuantumObserver qobs;
    if (capture == Capture::final_fraction) {
        qobs = [&](const WavePacket& w) {
            if (w.tau < capture_from)
                return;
            run.quantum_x.push_back(position_distribution(w));
            run.quantum_p.push_back(momentum_distribution(w));
        };
    } else if (capture == Capture::every_strobe) {
        qobs = [&](const WavePacket& w) {
            run.quantum_x.push_back(rebin(position_distribution(w), xb));
            run.quantum_p.push_back(rebin(momentum_distribution(w), pb));
        };
    }
    run.quantum = evolve(packet, potential, qopt, qobs);
    return run;
}

Fig1Result run_fig1(const RunConfig& config, const std::filesystem::path& out_dir)
{
    config.validate();
    const auto start = Clock::now();
    ArtifactSet art(out_dir);
    const EffectiveParams params = config.resolved_effective();
    const double tau_final = config.resolved_tau_final();
    const double om = config.physical.mirror_frequency;

    Fig1Result r;
    r.run = run_paired(config, params, config.grid, tau_final, Capture::final_fraction);
    const auto& cl = r.run.classical;
    const auto& qm = r.run.quantum;

    r.classical_x = average(r.run.classical_x);
    r.classical_p = average(r.run.classical_p);
    r.quantum_x = time_averaged_distribution(r.run.quantum_x);
    r.quantum_p = time_averaged_distribution(r.run.quantum_p);

    r.alpha = fit_power_law(cl, "dP");
    r.alpha_x = fit_power_law(cl, "dX");
    for (const Window w : {Window{30.0, tau_final}, Window{100.0, tau_final},
                           Window{10.0, 0.5 * tau_final}, Window{0.5 * tau_final, tau_final}})
        r.alpha_sensitivity.push_back(fit_power_law(cl, "dP", w));
    r.break_time = detect_break_time(qm, cl, "dP");
    r.quantum_dp = saturation_stats(qm, "dP");
    r.quantum_dx = saturation_stats(qm, "dX");
    r.classical_dp = saturation_stats(cl, "dP");
    r.classical_dx = saturation_stats(cl, "dX");
    r.quantum_energy = saturation_stats(qm, "mean_H", 1.0);
    r.classical_energy = saturation_stats(cl, "mean_H", 1.0);

    r.tail_threshold_x = r.classical_x.abs_quantile(0.95);
    r.tail_threshold_p = r.classical_p.abs_quantile(0.95);
    try {
        r.quantum_x_tails = fit_outward_tails(r.quantum_x, r.tail_threshold_x);
        r.quantum_p_tails = fit_outward_tails(r.quantum_p, r.tail_threshold_p);
    } catch (const std::invalid_argument& e) {
        r.tail_error = e.what();
    }

    ClassicalEnsemble seeds = sample_ensemble(
        UniformSquare{-config.section_bound, config.section_bound, -config.section_bound,
                      config.section_bound},
        config.section_trajectories, splitmix64(config.seed));
    r.section = poincare(seeds, EffectivePotential(params), config.section_periods, config.dtau());
    r.orbits = classify_orbits(r.section);

    // Outputs.
    const auto t = si_time(cl.tau(), om);
    std::vector<std::string> header{"tau", "t_s", "classical_dX", "classical_dP", "quantum_dX",
                                    "quantum_dP"};
    std::vector<std::vector<double>> cols{cl.tau(), t, cl.column("dX"), cl.column("dP"),
                                          qm.column("dX"), qm.column("dP")};
    if (config.x_scale_si > 0.0) {
        header.insert(header.end(), {"classical_dX_m", "quantum_dX_m"});
        cols.push_back(scaled(cl.column("dX"), config.x_scale_si));
        cols.push_back(scaled(qm.column("dX"), config.x_scale_si));
    }
    if (config.p_scale_si > 0.0) {
        header.insert(header.end(), {"classical_dP_si", "quantum_dP_si"});
        cols.push_back(scaled(cl.column("dP"), config.p_scale_si));
        cols.push_back(scaled(qm.column("dP"), config.p_scale_si));
    }
    art.write_columns("dispersion.csv", header, cols);
    art.write_columns("energy.csv", {"tau", "t_s", "classical_H", "quantum_H", "quantum_norm"},
                      {cl.tau(), t, cl.column("mean_H"), qm.column("mean_H"), qm.column("norm")});
    write_distribution(art, "dist_classical_x.csv", "X", r.classical_x);
    write_distribution(art, "dist_classical_p.csv", "P", r.classical_p);
    write_distribution(art, "dist_quantum_x.csv", "X", r.quantum_x);
    write_distribution(art, "dist_quantum_p.csv", "P", r.quantum_p);

    std::vector<std::vector<double>> section_rows;
    section_rows.reserve(r.section.points.size());
    for (const auto& pt : r.section.points)
        section_rows.push_back({static_cast<double>(pt.trajectory), static_cast<double>(pt.period),
                                pt.x, pt.p,
                                r.orbits.orbit[pt.trajectory] == OrbitClass::regular ? 1.0 : 0.0});
    art.write_csv("poincare.csv", {"trajectory", "period", "X", "P", "regular"}, section_rows);

    KeyValues& kv = r.results;
    put_fit(kv, "result.alpha", r.alpha);
    put_fit(kv, "result.alpha_x", r.alpha_x);
    for (const auto& f : r.alpha_sensitivity)
        kv.emplace_back(fmt::format("result.alpha_window_{}_{}", num(f.window.lo), num(f.window.hi)),
                        num(f.estimate));
    kv.emplace_back("result.break_time", r.break_time ? num(*r.break_time) : "none");
    put_saturation(kv, "result.quantum_dP", r.quantum_dp);
    put_saturation(kv, "result.quantum_dX", r.quantum_dx);
    put_saturation(kv, "result.classical_dP", r.classical_dp);
    put_saturation(kv, "result.classical_dX", r.classical_dx);
    put_saturation(kv, "result.quantum_H", r.quantum_energy);
    put_saturation(kv, "result.classical_H", r.classical_energy);
    kv.emplace_back("result.final_ratio_dP", num(cl.column("dP").back() / qm.column("dP").back()));
    kv.emplace_back("result.final_ratio_dX", num(cl.column("dX").back() / qm.column("dX").back()));
    kv.emplace_back("result.tail_threshold_x", num(r.tail_threshold_x));
    kv.emplace_back("result.tail_threshold_p", num(r.tail_threshold_p));
    if (r.quantum_x_tails && r.quantum_p_tails) {
        put_tail(kv, "result.tail_quantum_x_left", r.quantum_x_tails->left);
        put_tail(kv, "result.tail_quantum_x_right", r.quantum_x_tails->right);
        put_tail(kv, "result.tail_quantum_p_left", r.quantum_p_tails->left);
        put_tail(kv, "result.tail_quantum_p_right", r.quantum_p_tails->right);
    } else {
        kv.emplace_back("result.tail_error", r.tail_error);
    }
    kv.emplace_back("result.std_classical_x", num(r.classical_x.standard_deviation()));
    kv.emplace_back("result.std_classical_p", num(r.classical_p.standard_deviation()));
    kv.emplace_back("result.std_quantum_x", num(r.quantum_x.standard_deviation()));
    kv.emplace_back("result.std_quantum_p", num(r.quantum_p.standard_deviation()));
    kv.emplace_back("result.regular_orbits", std::to_string(r.orbits.regular));
    kv.emplace_back("result.chaotic_orbits", std::to_string(r.orbits.chaotic));

    KeyValues meta = run_metadata(config, seconds_since(start));
    meta.insert(meta.end(), kv.begin(), kv.end());
    art.write_key_values("metadata.txt", meta);
    art.commit();
    r.files = art.files();
    return r;
}

Fig2Result run_fig2(const RunConfig& config, const std::filesystem::path& out_dir)
{
    config.validate();
    const auto start = Clock::now();
    ArtifactSet art(out_dir);
    const EffectiveParams params = config.resolved_effective();
    const PairedRun run =
        run_paired(config, params, config.grid, config.resolved_tau_final(), Capture::every_strobe);

    Fig2Result r;
    r.tau = run.snapshot_tau;
    auto rows = [](const std::vector<DistributionSnapshot>& s) {
        std::vector<std::vector<double>> m;
        m.reserve(s.size());
        for (const auto& d : s)
            m.push_back(d.probability);
        return m;
    };
    r.classical_x = rows(run.classical_x);
    r.classical_p = rows(run.classical_p);
    r.quantum_x = rows(run.quantum_x);
    r.quantum_p = rows(run.quantum_p);

    const std::size_t nb = config.map_bins;
    const std::size_t lo = nb * 3 / 8;
    const std::size_t hi = nb - lo;
    for (std::size_t i = lo; i < hi; ++i) {
        r.classical_central_mass += r.classical_x.back()[i];
        r.quantum_central_mass += r.quantum_x.back()[i];
    }

    write_matrix(art, "map_classical_x.csv", r.tau, position_bins(config), r.classical_x);
    write_matrix(art, "map_classical_p.csv", r.tau, momentum_bins(config), r.classical_p);
    write_matrix(art, "map_quantum_x.csv", r.tau, position_bins(config), r.quantum_x);
    write_matrix(art, "map_quantum_p.csv", r.tau, momentum_bins(config), r.quantum_p);

    KeyValues meta = run_metadata(config, seconds_since(start));
    meta.emplace_back("result.strobes", std::to_string(r.tau.size()));
    meta.emplace_back("result.classical_central_mass", num(r.classical_central_mass));
    meta.emplace_back("result.quantum_central_mass", num(r.quantum_central_mass));
    art.write_key_values("metadata.txt", meta);
    art.commit();
    r.files = art.files();
    return r;
}

SweepPoint sweep_point(const RunConfig& config, const EffectiveParams& params, double tau_final,
                       bool time_average, kernels::Backend backend)
{
    const PairedRun run = run_paired(config, params, config.grid, tau_final, Capture::none, backend);
    auto pick = [&](const ObservableSeries& s, const std::string& col) {
        const auto& v = s.column(col);
        if (!time_average)
            return v.back();
        const auto& tau = s.tau();
        const double from = (1.0 - config.time_average_fraction) * tau_final - 1e-9;
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (tau[i] >= from) {
                sum += v[i];
                ++n;
            }
        return sum / static_cast<double>(n);
    };
    SweepPoint p;
    p.lambda_eff = params.lambda_eff;
    p.classical_dx = pick(run.classical, "dX");
    p.classical_dp = pick(run.classical, "dP");
    p.quantum_dx = pick(run.quantum, "dX");
    p.quantum_dp = pick(run.quantum, "dP");
    return p;
}

std::vector<double> sweep_values(const RunConfig& config)
{
    if (!config.lambda_list.empty())
        return config.lambda_list;
    const double top = 2.0 * config.resolved_effective().lambda_eff;
    std::vector<double> v(config.lambda_points);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = v.size() == 1 ? 0.0
                             : top * static_cast<double>(i) / static_cast<double>(v.size() - 1);
    return v;
}

Fig3Result run_fig3(const RunConfig& config, const std::filesystem::path& out_dir)
{
    config.validate();
    const auto start = Clock::now();
    ArtifactSet art(out_dir);
    const EffectiveParams base = config.resolved_effective();
    const double tau_final = config.resolved_tau_final();
    const auto values = sweep_values(config);

    Fig3Result r;
    r.points.resize(values.size());
    parallel_points(values.size(), [&](std::size_t i) {
        r.points[i] = sweep_point(config, with_lambda_eff(base, values[i]), tau_final,
                                  config.fig3_time_average, kernels::Backend::serial);
    });

    std::vector<double> lam, cdp, qdp, gap;
    for (const auto& p : r.points) {
        lam.push_back(p.lambda_eff);
        cdp.push_back(p.classical_dp);
        qdp.push_back(p.quantum_dp);
        gap.push_back(p.classical_dp - p.quantum_dp);
    }
    r.quantum_minima = interior_minima(qdp);
    if (lam.size() >= 3) {
        const FitResult trend = linear_fit(lam, cdp);
        r.classical_trend = trend.estimate;
        r.classical_trend_stderr = trend.std_error;
    }
    std::vector<double> sorted = gap;
    std::sort(sorted.begin(), sorted.end());
    if (!sorted.empty()) {
        const std::size_t m = sorted.size() / 2;
        r.median_gap = sorted.size() % 2 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
    }

    std::vector<std::vector<double>> rows;
    for (const auto& p : r.points)
        rows.push_back({p.lambda_eff, p.classical_dx, p.classical_dp, p.quantum_dx, p.quantum_dp});
    art.write_csv("sweep.csv",
                  {"lambda_eff", "classical_dX", "classical_dP", "quantum_dX", "quantum_dP"}, rows);

    KeyValues meta = run_metadata(config, seconds_since(start));
    std::string minima;
    for (std::size_t i : r.quantum_minima)
        minima += (minima.empty() ? "" : " ") + num(lam[i]);
    meta.emplace_back("result.quantum_dP_minima", minima.empty() ? "none" : minima);
    meta.emplace_back("result.classical_dP_trend", num(r.classical_trend));
    meta.emplace_back("result.classical_dP_trend_stderr", num(r.classical_trend_stderr));
    meta.emplace_back("result.median_gap", num(r.median_gap));
    art.write_key_values("metadata.txt", meta);
    art.commit();
    r.files = art.files();
    return r;
}

KbarResult run_kbar_sweep(const RunConfig& config, const std::filesystem::path& out_dir)
{
    config.validate();
    const auto start = Clock::now();
    ArtifactSet art(out_dir);
    const EffectiveParams base = config.resolved_effective();
    const double tau_final = config.resolved_tau_final();
    const double curve_tau =
        std::round(tau_of_t(config.fig3_t_final, config.physical.mirror_frequency) / drive_period) *
        drive_period;

    KbarResult r;
    for (double kbar : config.kbar_list) {
        EffectiveParams params = base;
        params.kbar = kbar;
        GridSpec grid = config.grid;
        grid.n = scaled_grid_size(config.grid.n, kbar);
        RunConfig local = config;
        local.grid = grid;

        const PairedRun run = run_paired(local, params, grid, tau_final, Capture::none);
        KbarRow row;
        row.kbar = kbar;
        row.grid_n = grid.n;
        row.classical_dp = run.classical.column("dP").back();
        row.quantum_dp = run.quantum.column("dP").back();
        row.classical_dx = run.classical.column("dX").back();
        row.quantum_dx = run.quantum.column("dX").back();
        row.gap = std::abs(row.quantum_dp - row.classical_dp);

        row.oscillation_amplitude = std::numeric_limits<double>::quiet_NaN();
        if (config.kbar_curve_points > 0) {
            RunConfig curve = local;
            curve.lambda_list.clear();
            curve.lambda_points = config.kbar_curve_points;
            const auto values = sweep_values(curve);
            std::vector<double> qdp(values.size());
            parallel_points(values.size(), [&](std::size_t i) {
                qdp[i] = sweep_point(curve, with_lambda_eff(params, values[i]), curve_tau,
                                     config.fig3_time_average, kernels::Backend::serial)
                             .quantum_dp;
            });
            row.oscillation_amplitude = oscillation_amplitude(values, qdp);
        }
        r.rows.push_back(row);
    }

    std::vector<std::vector<double>> rows;
    for (const auto& k : r.rows)
        rows.push_back({k.kbar, static_cast<double>(k.grid_n), k.classical_dp, k.quantum_dp,
                        k.classical_dx, k.quantum_dx, k.gap, k.oscillation_amplitude});
    art.write_csv("kbar.csv",
                  {"kbar", "grid_n", "classical_dP", "quantum_dP", "classical_dX", "quantum_dX",
                   "gap_dP", "oscillation_amplitude"},
                  rows);
    KeyValues meta = run_metadata(config, seconds_since(start));
    bool monotone = true;
    for (std::size_t i = 1; i < r.rows.size(); ++i)
        monotone = monotone && r.rows[i].gap <= r.rows[i - 1].gap;
    meta.emplace_back("result.gap_non_increasing", monotone ? "true" : "false");
    art.write_key_values("metadata.txt", meta);
    art.commit();
    r.files = art.files();
    return r;
}

namespace {

CoupledState initial_coupled(const CoupledParams& prm, double q0)
{
    CoupledState s;
    s.q = q0;
    const double det = prm.detuning_tilde + prm.mirror_coupling * q0;
    s.c = prm.pump_coupling / std::complex<double>(prm.cavity_decay, -det);
    return s;
}

std::vector<std::vector<double>> coupled_rows(const std::vector<CoupledState>& series)
{
    std::vector<std::vector<double>> rows;
    rows.reserve(series.size());
    for (const auto& s : series)
        rows.push_back({s.t, s.q, s.p, s.Q, s.P, s.c.real(), s.c.imag(), std::norm(s.c)});
    return rows;
}

const std::vector<std::string> coupled_header{"t", "q", "p", "Q", "P", "re_c", "im_c", "abs_c2"};

}  // namespace

CoupledCheckResult run_coupled_check(const RunConfig& config, const std::filesystem::path& out_dir)
{
    config.validate();
    const auto start = Clock::now();
    ArtifactSet art(out_dir);

    CoupledParams prm = CoupledParams::from(config.physical);
    if (config.detuning_tilde)
        prm.detuning_tilde = *config.detuning_tilde;
    prm.mech_damping = config.mech_damping;
    prm.sm_damping = config.sm_damping;
    prm.coupling = config.coupling;
    const double period = prm.mirror_period();
    const double t_final = period * static_cast<double>(config.coupled_periods);
    const double dt = period / static_cast<double>(config.coupled_samples_per_period);
    const double q0 = config.coupled_q0;

    CoupledCheckResult r;

    // Decoupled limits against closed forms.
    {
        CoupledParams free = prm;
        free.mirror_coupling = 0.0;
        free.condensate_coupling = 0.0;
        free.mech_damping = 0.0;
        free.sm_damping = 0.0;
        CoupledState s0;
        s0.q = q0;
        s0.Q = 1.0;
        const auto series = evolve_meanfield(s0, free, t_final, dt);
        const double om = free.mirror_frequency;
        const double sm = 4.0 * free.recoil_frequency;
        const std::complex<double> rate(-free.cavity_decay, free.detuning_tilde);
        const std::complex<double> steady = -free.pump_coupling / rate;
        for (const auto& s : series) {
            r.mirror_limit_error =
                std::max({r.mirror_limit_error, std::abs(s.q - q0 * std::cos(om * s.t)) / std::abs(q0),
                          std::abs(s.p + q0 * std::sin(om * s.t)) / std::abs(q0)});
            r.side_mode_limit_error =
                std::max({r.side_mode_limit_error, std::abs(s.Q - std::cos(sm * s.t)),
                          std::abs(s.P + std::sin(sm * s.t))});
            const std::complex<double> c = steady * (1.0 - std::exp(rate * s.t));
            r.cavity_limit_error = std::max(r.cavity_limit_error, std::abs(s.c - c) / std::abs(steady));
        }
    }

    const auto meanfield = evolve_meanfield(initial_coupled(prm, q0), prm, t_final, dt);
    art.write_csv("coupled_meanfield.csv", coupled_header, coupled_rows(meanfield));
    const auto adiabatic = evolve_adiabatic(initial_coupled(prm, q0), prm, t_final, dt);
    art.write_csv("coupled_adiabatic.csv", coupled_header, coupled_rows(adiabatic));

    const std::size_t n = config.coupled_xi_points;
    r.xi.resize(n);
    r.ansatz_residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        CoupledParams local = prm;
        local.mirror_coupling =
            prm.mirror_coupling * static_cast<double>(i) / static_cast<double>(n - 1);
        r.xi[i] = local.mirror_coupling;
        const auto series = evolve_meanfield(initial_coupled(local, q0), local, period, dt);
        r.ansatz_residual[i] = mirror_ansatz_residual(series, q0, local.mirror_frequency).residual;
    }
    r.residual_monotone = true;
    for (std::size_t i = 1; i < n; ++i)
        r.residual_monotone = r.residual_monotone && r.ansatz_residual[i] > r.ansatz_residual[i - 1];
    art.write_columns("ansatz_sweep.csv", {"xi", "residual"}, {r.xi, r.ansatz_residual});

    KeyValues meta = run_metadata(config, seconds_since(start));
    meta.emplace_back("result.mirror_limit_error", num(r.mirror_limit_error));
    meta.emplace_back("result.side_mode_limit_error", num(r.side_mode_limit_error));
    meta.emplace_back("result.cavity_limit_error", num(r.cavity_limit_error));
    meta.emplace_back("result.ansatz_residual_monotone", r.residual_monotone ? "true" : "false");
    art.write_key_values("metadata.txt", meta);
    art.commit();
    r.files = art.files();
    return r;
}

CustomResult run_custom(const RunConfig& config, const std::filesystem::path& out_dir)
{
    config.validate();
    const auto start = Clock::now();
    ArtifactSet art(out_dir);
    CustomResult r;
    r.run = run_paired(config, config.resolved_effective(), config.grid,
                       config.resolved_tau_final(), Capture::none);
    const auto& cl = r.run.classical;
    const auto& qm = r.run.quantum;
    const auto t = si_time(cl.tau(), config.physical.mirror_frequency);
    art.write_columns("series.csv",
                      {"tau", "t_s", "classical_mean_X", "classical_mean_P", "classical_dX",
                       "classical_dP", "classical_H", "quantum_mean_X", "quantum_mean_P",
                       "quantum_dX", "quantum_dP", "quantum_H", "quantum_norm"},
                      {cl.tau(), t, cl.column("mean_X"), cl.column("mean_P"), cl.column("dX"),
                       cl.column("dP"), cl.column("mean_H"), qm.column("mean_X"),
                       qm.column("mean_P"), qm.column("dX"), qm.column("dP"), qm.column("mean_H"),
                       qm.column("norm")});
    art.write_key_values("metadata.txt", run_metadata(config, seconds_since(start)));
    art.commit();
    r.files = art.files();
    return r;
}

std::vector<std::string> run_experiment(const RunConfig& config,
                                        const std::filesystem::path& out_dir)
{
    switch (config.experiment) {
    case Experiment::fig1:
        return run_fig1(config, out_dir).files;
    case Experiment::fig2:
        return run_fig2(config, out_dir).files;
    case Experiment::fig3:
        return run_fig3(config, out_dir).files;
    case Experiment::kbar_sweep:
        return run_kbar_sweep(config, out_dir).files;
    case Experiment::coupled_check:
        return run_coupled_check(config, out_dir).files;
    case Experiment::custom:
        return run_custom(config, out_dir).files;
    }
    throw ConfigError("unknown experiment");
}

}  // namespace dynloc
