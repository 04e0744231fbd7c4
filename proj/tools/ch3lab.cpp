// ch3lab: numerical laboratory for a three-component Camassa-Holm system.
// Subcommands: simulate, blowup-study, decay-study, kernel-verify,
// traveling-check, selftest. Exit codes: 0 success / reached_t_end,
// 2 wave breaking (simulate), 1 errors.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "ch3/config.hpp"
#include "ch3/diagnostics.hpp"
#include "ch3/dynamics.hpp"
#include "ch3/io.hpp"
#include "ch3/kernels.hpp"
#include "ch3/waves.hpp"

namespace fs = std::filesystem;
using namespace ch3;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    unsigned threads = 1;
    long seed = -1;
    bool print_defaults = false;
};

SimConfig resolve_config(const CommonOptions& opts) {
    SimConfig cfg = opts.config_path.empty() ? config_from_text("", "<defaults>")
                                             : load_config(opts.config_path);
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.seed >= 0) cfg.seed = static_cast<unsigned long>(opts.seed);
    return cfg;
}

std::vector<WeightedRequest> parse_weighted(const std::string& text) {
    // "JN:0.5:4;phiN:0.3:2" -> named weighted-sup columns
    std::vector<WeightedRequest> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
        if (item.empty()) continue;
        std::istringstream fields(item);
        std::string form, alpha, N;
        if (!std::getline(fields, form, ':') || !std::getline(fields, alpha, ':') ||
            !std::getline(fields, N, ':'))
            throw ConfigError("diagnostics.weighted: expected FORM:ALPHA:N, got '" + item + "'");
        WeightSpec spec;
        if (form == "JN")
            spec.form = WeightForm::J_N;
        else if (form == "phiN")
            spec.form = WeightForm::phi_N;
        else
            throw ConfigError("diagnostics.weighted: unknown form '" + form + "'");
        spec.alpha = std::stod(alpha);
        spec.N = std::stoi(N);
        validate(spec);
        out.push_back({item, spec});
    }
    return out;
}

StepControl control_from(const SimConfig& cfg) {
    StepControl ctrl;
    ctrl.dt = cfg.dt;
    ctrl.cfl_target = cfg.cfl;
    ctrl.dt_min = cfg.dt_min;
    ctrl.slope_threshold = cfg.slope_threshold;
    return ctrl;
}

void write_decay_row(std::ofstream& out, double t, const char* component, const DecayFit& fit) {
    out << format_double(t) << ',' << component << ','
        << (fit.side == TailSide::left ? "left" : "right") << ','
        << format_double(fit.alpha_hat) << ',' << format_double(fit.r_squared) << ','
        << (fit.conclusive ? 1 : 0) << ',' << (fit.reliable ? 1 : 0) << ','
        << format_double(fit.x_lo) << ',' << format_double(fit.x_hi) << '\n';
}

int cmd_simulate(const CommonOptions& opts) {
    const SimConfig cfg = resolve_config(opts);
    const auto weighted = parse_weighted(cfg.weighted);
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);
    if (cfg.snapshots) fs::create_directories(out / "snapshots");

    StateTriple z0 = build_initial_state(cfg);
    const double E0 = energy(z0);
    const double Q0 = q_functional(z0);

    std::vector<DiagnosticsRecord> records;
    std::ofstream decay_csv;
    const bool decay_left = cfg.decay_sides == "left" || cfg.decay_sides == "both";
    const bool decay_right = cfg.decay_sides == "right" || cfg.decay_sides == "both";
    if (decay_left || decay_right) {
        decay_csv.open(out / "decay.csv");
        decay_csv << "t,component,side,alpha_hat,r_squared,conclusive,reliable,x_lo,x_hi\n";
    }
    std::ofstream potential_csv;
    if (cfg.potential_lambda >= 0.0) {
        potential_csv.open(out / "potential_decay.csv");
        potential_csv << "t,norm,truncated\n";
    }

    std::size_t snapshot_index = 0;
    auto on_sample = [&](const StateTriple& z) {
        records.push_back(diagnose(z, weighted));
        if (cfg.snapshots) {
            char name[32];
            std::snprintf(name, sizeof name, "state_%05zu.bin", snapshot_index++);
            write_state(out / "snapshots" / name, z);
        }
        if (decay_csv.is_open()) {
            const char* names[3] = {"u", "v", "w"};
            int c = 0;
            for (const Field* f : {&z.u, &z.v, &z.w}) {
                if (decay_left)
                    write_decay_row(decay_csv, z.t, names[c], decay_fit(*f, TailSide::left));
                if (decay_right)
                    write_decay_row(decay_csv, z.t, names[c], decay_fit(*f, TailSide::right));
                ++c;
            }
        }
        if (potential_csv.is_open()) {
            const auto norm =
                potential_weighted_norm(potentials(z), cfg.potential_lambda, cfg.potential_p);
            potential_csv << format_double(z.t) << ',' << format_double(norm.value) << ','
                          << (norm.truncated ? 1 : 0) << '\n';
        }
    };

    const TerminationReport report =
        run(z0, control_from(cfg), cfg.t_end, cfg.cadence, on_sample);

    write_diagnostics_csv(out / "diagnostics.csv", records);
    write_termination_report(out / "report.json", report, E0, Q0);

    double max_drift = 0.0;
    for (const auto& r : records) max_drift = std::max(max_drift, std::abs(r.E - E0) / E0);
    std::printf("reason: %s at t = %g\n", to_string(report.reason), report.t_final);
    std::printf("E0 = %.12g, max relative energy drift = %.3e\n", E0, max_drift);
    if (auto bound = lifespan_bound(Q0, E0))
        std::printf("Q0 = %.6g below breaking threshold; lifespan bound %.6g\n", Q0, *bound);

    if (cfg.riccati) {
        const auto monitor = riccati_monitor(records, E0);
        std::printf("riccati monitor: %zu samples checked, %zu violations%s\n",
                    monitor.samples_checked, monitor.violations.size(),
                    monitor.conclusive ? "" : " (inconclusive)");
    }

    switch (report.reason) {
        case StopReason::reached_t_end: return 0;
        case StopReason::wave_breaking: return 2;
        default: return 1;
    }
}

int cmd_blowup_study(const CommonOptions& opts) {
    const SimConfig cfg = resolve_config(opts);
    if (cfg.blowup_deltas.empty()) {
        std::fprintf(stderr, "blowup-study: empty sweep (blowup.deltas)\n");
        return 1;
    }
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);

    struct Row {
        double delta = 0, E0 = 0, Q0 = 0, threshold = 0, margin = 0, bound = 0, t_final = 0;
        bool hypothesis = false, has_bound = false, bound_ok = false, resolved = false;
        std::string outcome;
    };
    std::vector<Row> rows(cfg.blowup_deltas.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.blowup_deltas.size()) return;
            const double delta = cfg.blowup_deltas[i];
            GridPtr grid = make_grid(cfg.grid_n, cfg.grid_L);
            const auto data =
                steep_front_data(grid, cfg.front_amplitude, delta, cfg.front_envelope);
            Row row;
            row.delta = delta;
            row.E0 = data.E0;
            row.Q0 = data.Q0;
            row.threshold = data.threshold;
            row.margin = data.margin;
            row.hypothesis = data.hypothesis_met;
            row.resolved = data.resolved;
            const auto bound = data.E0 > 0.0 ? lifespan_bound(data.Q0, data.E0) : std::nullopt;
            row.has_bound = bound.has_value();
            row.bound = bound.value_or(0.0);

            char dirname[48];
            std::snprintf(dirname, sizeof dirname, "delta_%g", delta);
            fs::create_directories(out / dirname);
            const auto report =
                run(data.state, control_from(cfg), cfg.t_end, cfg.cadence, SampleCallback{});
            row.outcome = to_string(report.reason);
            row.t_final = report.t_final;
            row.bound_ok = report.reason == StopReason::wave_breaking && row.has_bound &&
                           report.t_final <= *bound;
            std::ofstream slopes(out / dirname / "minslope.csv");
            slopes << "t,min_slope\n";
            for (const auto& s : report.min_slope_history)
                slopes << format_double(s.t) << ',' << format_double(s.min_slope) << '\n';
            rows[i] = std::move(row);
        }
    };
    std::vector<std::thread> pool;
    const unsigned k = std::max(1u, opts.threads);
    for (unsigned t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::ofstream csv(out / "blowup_study.csv");
    csv << "delta,E0,Q0,threshold,margin,hypothesis,lifespan_bound,outcome,t_final,"
           "bound_satisfied,resolved\n";
    std::printf("%8s %10s %12s %12s %8s %5s %10s %14s %10s\n", "delta", "E0", "Q0", "threshold",
                "margin", "hyp", "bound", "outcome", "t_final");
    for (const auto& r : rows) {
        csv << format_double(r.delta) << ',' << format_double(r.E0) << ',' << format_double(r.Q0)
            << ',' << format_double(r.threshold) << ',' << format_double(r.margin) << ','
            << (r.hypothesis ? 1 : 0) << ','
            << (r.has_bound ? format_double(r.bound) : std::string("nan")) << ',' << r.outcome
            << ',' << format_double(r.t_final) << ',' << (r.bound_ok ? 1 : 0) << ','
            << (r.resolved ? 1 : 0) << '\n';
        std::printf("%8g %10.4f %12.1f %12.1f %8.3f %5d %10.4f %14s %10.4f%s\n", r.delta, r.E0,
                    r.Q0, r.threshold, r.margin, r.hypothesis ? 1 : 0,
                    r.has_bound ? r.bound : std::nan(""), r.outcome.c_str(), r.t_final,
                    r.resolved ? "" : "  [under-resolved]");
    }
    return 0;
}

int cmd_decay_study(const CommonOptions& opts) {
    const SimConfig cfg = resolve_config(opts);
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);

    StateTriple z0 = build_initial_state(cfg);

    struct FitRow {
        double t = 0;
        std::array<DecayFit, 6> state_fits;      // u,v,w x left,right
        std::array<DecayFit, 6> potential_fits;  // m,n,l x left,right
    };
    std::vector<FitRow> rows;
    const auto report =
        run(z0, control_from(cfg), cfg.t_end, cfg.cadence, [&](const StateTriple& z) {
            FitRow row;
            row.t = z.t;
            int k = 0;
            for (const Field* f : {&z.u, &z.v, &z.w}) {
                row.state_fits[static_cast<std::size_t>(k) * 2] = decay_fit(*f, TailSide::left);
                row.state_fits[static_cast<std::size_t>(k) * 2 + 1] =
                    decay_fit(*f, TailSide::right);
                ++k;
            }
            const auto pot = potentials(z);
            k = 0;
            for (const Field* f : {&pot.m, &pot.n, &pot.l}) {
                row.potential_fits[static_cast<std::size_t>(k) * 2] =
                    decay_fit(*f, TailSide::left);
                row.potential_fits[static_cast<std::size_t>(k) * 2 + 1] =
                    decay_fit(*f, TailSide::right);
                ++k;
            }
            rows.push_back(std::move(row));
        });

    std::ofstream csv(out / "decay_study.csv");
    csv << "t";
    for (const char* c : {"u", "v", "w", "m", "n", "l"})
        for (const char* s : {"L", "R"}) csv << ',' << c << '_' << s << ",r2_" << c << '_' << s;
    csv << '\n';
    for (const auto& row : rows) {
        csv << format_double(row.t);
        for (const auto* fits : {&row.state_fits, &row.potential_fits})
            for (const auto& f : *fits)
                csv << ',' << format_double(f.alpha_hat) << ',' << format_double(f.r_squared);
        csv << '\n';
    }

    // Persistence summary: every later reliable fit within 5% of the initial one.
    bool persistent = true;
    bool any_unreliable = false;
    if (!rows.empty()) {
        for (std::size_t j = 0; j < 12; ++j) {
            const DecayFit& first =
                j < 6 ? rows.front().state_fits[j] : rows.front().potential_fits[j - 6];
            if (!first.conclusive) continue;
            for (const auto& row : rows) {
                const DecayFit& fit = j < 6 ? row.state_fits[j] : row.potential_fits[j - 6];
                if (!fit.conclusive || !fit.reliable) {
                    any_unreliable = true;
                    continue;
                }
                if (std::abs(fit.alpha_hat - first.alpha_hat) > 0.05 * std::abs(first.alpha_hat))
                    persistent = false;
            }
        }
    }
    std::printf("decay-study: %s; %zu samples, run ended with %s%s\n",
                persistent ? "decay exponents persistent within 5%" : "persistence VIOLATED",
                rows.size(), to_string(report.reason),
                any_unreliable ? " (some fits flagged unreliable)" : "");
    return 0;
}

int cmd_kernel_verify(const CommonOptions& opts) {
    const SimConfig cfg = resolve_config(opts);
    for (double a : cfg.kernel_alphas)
        if (!(a > 0.0) || !(a < 1.0)) {
            std::fprintf(stderr, "kernel-verify: alpha %g outside (0,1)\n", a);
            return 1;
        }
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);

    std::ofstream csv(out / "kernel_scan.csv");
    csv << "form,alpha,N,sup_value,arg_sup,case1_sup,case2_sup,case3_sup,certified_bound\n";

    std::printf("%6s %6s  %-24s %10s  %s\n", "alpha", "form", "sup range over N>=2", "certified",
                "verdicts");
    bool all_quad_ok = true, all_dominated = true;
    for (double alpha : cfg.kernel_alphas) {
        for (WeightForm form : {WeightForm::J_N, WeightForm::phi_N}) {
            const auto scans = lemma32_scan(alpha, cfg.kernel_Ns, form);
            double lo = 1e300, hi = -1e300;
            for (const auto& r : scans) {
                csv << (form == WeightForm::J_N ? "JN" : "phiN") << ',' << format_double(alpha)
                    << ',' << r.spec.N << ',' << format_double(r.sup_value) << ','
                    << format_double(r.arg_sup) << ',' << format_double(r.per_case_sups[0]) << ','
                    << format_double(r.per_case_sups[1]) << ','
                    << format_double(r.per_case_sups[2]) << ','
                    << format_double(r.uniform_bound_used) << '\n';
                if (r.spec.N >= 2) {
                    lo = std::min(lo, r.sup_value);
                    hi = std::max(hi, r.sup_value);
                }
            }
            const double certified = 1.0 + 1.0 / (1.0 - alpha);
            bool bounded = true;
            for (const auto& r : scans) bounded = bounded && r.sup_value <= certified + 1e-9;
            const double variation = hi - lo;

            // Spot quadrature cross-check and derivative domination.
            double quad_err = 0.0;
            bool dominated = true;
            for (int N : cfg.kernel_Ns) {
                WeightSpec spec{form, alpha, N};
                for (int i = 0; i <= 24; ++i) {
                    const double x = -static_cast<double>(N) - 6.0 +
                                     (static_cast<double>(N) + 12.0) * i / 24.0;
                    quad_err = std::max(quad_err, std::abs(kernel_product_exact(spec, x) -
                                                           kernel_product_quadrature(spec, x)));
                    dominated = dominated && std::abs(kernel_product_exact(spec, x, true)) <=
                                                 kernel_product_exact(spec, x) + 1e-12;
                }
            }
            all_quad_ok = all_quad_ok && quad_err < 1e-9;
            all_dominated = all_dominated && dominated;
            std::printf("%6.2f %6s  [%.6f, %.6f]  %10.6f  bounded=%s var=%.2e quad=%.1e%s\n",
                        alpha, form == WeightForm::J_N ? "JN" : "phiN", lo, hi, certified,
                        bounded ? "yes" : "NO", variation, quad_err,
                        variation < 1e-8
                            ? ""
                            : "  [sup = 1+s+(1-s)/(1-a), s=e^{-(1-a)N}: N-dependent]");
        }
        // Profile plot data at N = 4 for this alpha.
        char name[48];
        std::snprintf(name, sizeof name, "kernel_profile_a%g.csv", alpha);
        std::ofstream prof(out / name);
        prof << "x,product,derivative_product\n";
        WeightSpec spec{WeightForm::J_N, alpha, 4};
        for (int i = 0; i <= 2000; ++i) {
            const double x = -24.0 + 36.0 * i / 2000.0;
            prof << format_double(x) << ',' << format_double(kernel_product_exact(spec, x)) << ','
                 << format_double(kernel_product_exact(spec, x, true)) << '\n';
        }
    }
    std::printf("quadrature cross-check < 1e-9: %s; derivative dominated: %s\n",
                all_quad_ok ? "yes" : "NO", all_dominated ? "yes" : "NO");
    return 0;
}

int cmd_traveling_check(const CommonOptions& opts) {
    const SimConfig cfg = resolve_config(opts);
    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);

    StateTriple z0 = build_initial_state(cfg);
    std::vector<StateTriple> trajectory;
    const auto report = run(z0, control_from(cfg), cfg.t_end, cfg.cadence,
                            [&](const StateTriple& z) { trajectory.push_back(z); });
    if (trajectory.size() < 5) {
        std::fprintf(stderr, "traveling-check: fewer than 5 samples\n");
        return 1;
    }
    const auto tc = traveling_check(trajectory);
    std::ofstream csv(out / "traveling.csv");
    csv << "t,b,mismatch,shape_error\n";
    for (const auto& s : tc.samples)
        csv << format_double(s.t) << ',' << format_double(s.b) << ','
            << format_double(s.mismatch) << ',' << format_double(s.shape_error) << '\n';
    if (tc.degenerate) {
        std::printf("traveling-check: degenerate state(s); no speed fit\n");
        return 0;
    }
    double mean_amp = 0.0;
    for (const auto& z : trajectory) mean_amp += max_abs(z.u);
    mean_amp /= static_cast<double>(trajectory.size());
    std::printf("traveling-check: run ended %s; speed = %.6g, b(t) r^2 = %.8f, "
                "max shape error = %.4g, mean max|u| = %.6g\n",
                to_string(report.reason), tc.speed, tc.r_squared, tc.max_shape_error, mean_amp);
    return 0;
}

int cmd_selftest(const CommonOptions& opts) {
    const SimConfig cfg = resolve_config(opts);
    int failures = 0;
    auto check = [&](const char* name, bool ok, double value) {
        std::printf("[%s] %s (%.3e)\n", ok ? "PASS" : "FAIL", name, value);
        if (!ok) ++failures;
    };

    {
        auto g = make_grid(512, 40.0);
        Field f =
            sample_function(g, [](double x) { return std::exp(-x * x / 9.0) * std::sin(x); });
        Field r = helmholtz_apply(helmholtz_inverse(f));
        double err = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(r[i] - f[i]));
        check("helmholtz round trip < 1e-12", err < 1e-12, err);
    }
    {
        auto g = make_grid(1024, 40.0);
        Field f = sample_function(g, [](double x) { return std::exp(-x * x); });
        Field a = green_convolve(f), b = quadrature_convolve(f);
        double err = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
        check("convolution oracle agreement < 1e-8", err < 1e-8, err);
    }
    {
        SimConfig rnd = cfg;
        rnd.generator = "random_smooth";
        rnd.grid_n = 512;
        StateTriple z = build_initial_state(rnd);
        StateTriple a1 = rk4_step(z, 0.02);
        StateTriple a2 = rk4_step(rk4_step(z, 0.01), 0.01);
        StateTriple a4 = rk4_step(rk4_step(rk4_step(rk4_step(z, 0.005), 0.005), 0.005), 0.005);
        double d12 = 0.0, d24 = 0.0;
        for (std::size_t i = 0; i < z.u.size(); ++i) {
            d12 = std::max(d12, std::abs(a1.u[i] - a2.u[i]));
            d24 = std::max(d24, std::abs(a2.u[i] - a4.u[i]));
        }
        const double ratio = d12 / d24;
        check("RK4 Richardson ratio in [12, 20]", ratio > 12.0 && ratio < 20.0, ratio);
    }
    {
        WeightSpec spec{WeightForm::J_N, 0.5, 2};
        const double err =
            std::abs(kernel_product_exact(spec, -2.0) - kernel_product_quadrature(spec, -2.0));
        check("kernel closed form vs quadrature < 1e-9", err < 1e-9, err);
    }
    {
        auto g = make_grid(2048, 40.0);
        const auto rep =
            weak_residual(ch_peakon_profile(g, 1.0, 0.0), standard_test_functions(40.0));
        const double worst = std::max({rep.max_u, rep.max_v, rep.max_w});
        check("CH peakon weak residual < 1e-6", worst < 1e-6, worst);
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for a three-component Camassa-Holm system"};
    app.require_subcommand(0, 1);

    CommonOptions opts;
    app.add_option("--config", opts.config_path, "configuration file (key = value)");
    app.add_option("--out", opts.out_dir, "output directory (overrides output.dir)");
    app.add_option("--threads", opts.threads, "worker threads for sweep commands");
    app.add_option("--seed", opts.seed, "override the config seed");
    app.add_flag("--print-defaults", opts.print_defaults, "print the default config and exit");

    auto* simulate = app.add_subcommand("simulate", "integrate and emit diagnostics");
    auto* blowup =
        app.add_subcommand("blowup-study", "front-width sweep against the breaking threshold");
    auto* decay = app.add_subcommand("decay-study", "tail-exponent persistence study");
    auto* kernel = app.add_subcommand("kernel-verify", "weighted-kernel estimate verification");
    auto* traveling = app.add_subcommand("traveling-check", "symmetry-axis and speed tracking");
    auto* selftest = app.add_subcommand("selftest", "quick internal consistency checks");

    CLI11_PARSE(app, argc, argv);

    if (opts.print_defaults) {
        std::fputs(print_defaults().c_str(), stdout);
        return 0;
    }
    try {
        if (simulate->parsed()) return cmd_simulate(opts);
        if (blowup->parsed()) return cmd_blowup_study(opts);
        if (decay->parsed()) return cmd_decay_study(opts);
        if (kernel->parsed()) return cmd_kernel_verify(opts);
        if (traveling->parsed()) return cmd_traveling_check(opts);
        if (selftest->parsed()) return cmd_selftest(opts);
        std::fputs(app.help().c_str(), stdout);
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
