#pragma once

// Sweep orchestration: Cartesian product of the config's sweep axes,
// dispatched over a bounded worker pool.  Row order is fixed by the axis
// order (sorted by name, last axis fastest), so the CSV bytes do not depend
// on the worker count.  A JSON-lines side log records per-point convergence
// metadata; per-point failures land in an `error` column and flip the exit
// status to 1.

#include <atomic>
#include <filesystem>
#include <thread>

#include <json.hpp>

#include "phasepump/adiabatic.hpp"
#include "phasepump/classical.hpp"
#include "phasepump/config.hpp"
#include "phasepump/csv.hpp"
#include "phasepump/duffing.hpp"
#include "phasepump/floquet.hpp"
#include "phasepump/propagation.hpp"

namespace phasepump {

struct SweepOutcome {
    int exit_code = 0;
    std::string csv_path;
    std::string log_path;
    int rows = 0;
    int failures = 0;
};

namespace detail {

struct PointResult {
    std::vector<double> outputs;
    std::string error;
    nlohmann::json convergence;
};

inline std::vector<std::string> sweep_columns(RunMode mode) {
    switch (mode) {
        case RunMode::classical:
            return {"r", "delta", "omega", "chi", "slip_theta_fwd",
                    "slip_theta_bwd", "error"};
        case RunMode::adiabatic:
            return {"r", "delta", "omega", "m_e", "chi", "error"};
        case RunMode::floquet:
            return {"r", "omega", "m_e", "chi", "epsilon0", "pt_residual",
                    "kmax_used", "qmax_used", "error"};
        case RunMode::propagate:
            return {"r", "omega", "m_e", "winding", "strobe_fidelity",
                    "error"};
        case RunMode::duffing:
            return {"gamma1", "a1", "kappa1", "lambda1", "delta1", "d_pred",
                    "s_pred", "c_pred", "d_fit", "s_fit", "c_fit",
                    "residual_rel", "error"};
    }
    return {};
}

inline PointResult eval_model_point(const RunConfig& cfg,
                                    const ModelParams& p) {
    PointResult res;
    const auto& n = cfg.num;
    switch (cfg.mode) {
        case RunMode::classical: {
            auto w = winding(p, n.settle_cycles, n.measure_cycles, n.tol);
            auto [fwd, bwd] = hysteresis_pair(p, n.tol);
            double sf = fwd.slips.empty()
                            ? std::nan("")
                            : fwd.slips.front().theta;
            double sb = bwd.slips.empty()
                            ? std::nan("")
                            : bwd.slips.front().theta;
            res.outputs = {p.r, p.delta, p.omega, w.chi, sf, sb};
            res.convergence = {{"cycles", w.cycles_used},
                               {"estimate", w.convergence_estimate}};
            break;
        }
        case RunMode::adiabatic: {
            AdiabaticConfig ac{n.n_excited, n.theta_grid, 0.0, n.k_max};
            auto curve = pump_curve(p, ac);
            res.outputs = {p.r, p.delta, p.omega, p.m_e, curve.chi};
            res.convergence = {{"theta_grid", n.theta_grid},
                               {"k_max", n.k_max}};
            break;
        }
        case RunMode::floquet: {
            auto rep = floquet_representative(p, n.k_max, n.level, n.q_max);
            auto w = floquet_winding(rep, p);
            auto pt = pt_check(rep);
            res.outputs = {p.r,
                           p.omega,
                           p.m_e,
                           w.chi,
                           rep.epsilon,
                           pt.residual,
                           static_cast<double>(n.k_max),
                           static_cast<double>(rep.basis.q_max)};
            res.convergence = {{"ritz_residual", rep.residual},
                               {"edge_k", rep.edge_weight_k()},
                               {"edge_q", rep.edge_weight_q()}};
            break;
        }
        case RunMode::propagate: {
            auto rep = floquet_representative(p, n.k_max, n.level, n.q_max);
            VectorXcd psi0 = chi_at_theta(rep, 0.0);
            psi0.normalize();
            const double T = two_pi / std::abs(p.omega);
            double dt = T / std::ceil(T / n.dt);
            auto run = propagate(p, psi0, 0.0, T, dt);
            res.outputs = {p.r, p.omega, p.m_e, run.final_phase / two_pi,
                           fidelity(psi0, run.states.back())};
            res.convergence = {
                {"norm_drift", std::abs(run.norms.back() - 1.0)},
                {"dt", dt}};
            break;
        }
        default:
            res.error = "not a model mode";
    }
    return res;
}

inline PointResult eval_duffing_point(const RunConfig& cfg,
                                      const DuffingParams& d) {
    PointResult res;
    std::vector<std::array<double, 4>> inits;
    if (d.kind == CouplingKind::single) {
        inits.push_back({1.0, 0.0, 0.0, 0.0});
    } else {
        double phi0 = d.kind == CouplingKind::nonlinear_parametric ? 1.2
                                                                   : 2.5;
        inits.push_back(
            {1.0, 0.0, std::cos(phi0), -d.omega2 * std::sin(phi0)});
        inits.push_back(
            {1.0, 0.0, std::cos(phi0), d.omega2 * std::sin(phi0)});
    }
    auto rep = reduction_check(d, inits, cfg.num.t_end, cfg.num.t_skip);
    res.outputs = {d.gamma1, d.a1,      d.kappa1, d.lambda1, d.delta1,
                   rep.d_pred, rep.s_pred, rep.c_pred, rep.d_fit,
                   rep.s_fit,  rep.c_fit,  rep.residual_rel};
    res.convergence = {{"amplitude_ratio_dev", rep.amplitude_ratio_dev}};
    return res;
}

inline PointResult eval_point(const RunConfig& cfg,
                              const std::vector<double>& axis_values) {
    PointResult res;
    try {
        if (cfg.mode == RunMode::duffing) {
            DuffingParams d = cfg.duffing;
            for (std::size_t a = 0; a < cfg.axes.size(); ++a)
                set_duffing_param(d, cfg.axes[a].name, axis_values[a]);
            res = eval_duffing_point(cfg, d);
        } else {
            ModelParams p = cfg.model;
            for (std::size_t a = 0; a < cfg.axes.size(); ++a)
                set_model_param(p, cfg.axes[a].name, axis_values[a]);
            res = eval_model_point(cfg, p);
        }
    } catch (const std::exception& e) {
        res.error = e.what();
        res.outputs.clear();
    }
    return res;
}

}  // namespace detail

inline SweepOutcome run_sweep(const RunConfig& cfg, int workers,
                              const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    // odometer over the sorted axes, last axis fastest
    std::size_t n_points = 1;
    for (const auto& ax : cfg.axes) n_points *= ax.values.size();
    std::vector<std::vector<double>> points(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        std::size_t rem = i;
        std::vector<double> vals(cfg.axes.size());
        for (std::size_t a = cfg.axes.size(); a-- > 0;) {
            const auto& vs = cfg.axes[a].values;
            vals[a] = vs[rem % vs.size()];
            rem /= vs.size();
        }
        points[i] = std::move(vals);
    }

    std::vector<detail::PointResult> results(n_points);
    workers = std::max(1, workers);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n_points) return;
            results[i] = detail::eval_point(cfg, points[i]);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    const std::string serialized = serialize_config(cfg);
    const std::string hash = content_hash(serialized);
    SweepOutcome out;
    out.csv_path = (fs::path(out_dir) / cfg.output_name()).string();
    out.log_path = out.csv_path + ".log.jsonl";
    out.rows = static_cast<int>(n_points);

    CsvWriter csv(out.csv_path);
    csv.metadata("tool", std::string("phase-pump-lab ") + tool_version);
    csv.metadata("mode", mode_name(cfg.mode));
    csv.metadata("config-hash", hash);
    csv.metadata("defaults",
                 "k_max=" + std::to_string(cfg.num.k_max) +
                     " q_max=" + std::to_string(cfg.num.q_max) +
                     " theta_grid=" + std::to_string(cfg.num.theta_grid) +
                     " n_excited=" + std::to_string(cfg.num.n_excited) +
                     " tol=" + format_sig(cfg.num.tol) +
                     " dt=" + format_sig(cfg.num.dt));
    auto cols = detail::sweep_columns(cfg.mode);
    csv.header(cols);

    std::ofstream log(out.log_path);
    for (std::size_t i = 0; i < n_points; ++i) {
        const auto& res = results[i];
        std::vector<std::string> cells;
        if (res.error.empty()) {
            for (double v : res.outputs) cells.push_back(format_sig(v));
            cells.push_back("");
        } else {
            ++out.failures;
            cells.assign(cols.size() - 1, "nan");
            cells.push_back(csv_safe(res.error));
        }
        csv.row(cells);

        nlohmann::json entry;
        entry["index"] = i;
        for (std::size_t a = 0; a < cfg.axes.size(); ++a)
            entry["axes"][cfg.axes[a].name] = points[i][a];
        entry["status"] = res.error.empty() ? "ok" : "error";
        if (!res.error.empty()) entry["error"] = res.error;
        if (!res.convergence.is_null())
            entry["convergence"] = res.convergence;
        log << entry.dump() << "\n";
    }
    out.exit_code = out.failures > 0 ? 1 : 0;
    return out;
}

}  // namespace phasepump
