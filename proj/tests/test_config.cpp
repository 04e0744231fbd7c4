#include <doctest.h>

#include <cstdlib>
#include <string>

#include "ch3/config.hpp"
#include "ch3/state.hpp"

using namespace ch3;

TEST_CASE("the printed defaults parse back to the default config") {
    const SimConfig parsed = config_from_text(print_defaults(), "<defaults>", false);
    const SimConfig d;
    CHECK(parsed.grid_n == d.grid_n);
    CHECK(parsed.grid_L == d.grid_L);
    CHECK(parsed.generator == d.generator);
    CHECK(parsed.dt == d.dt);
    CHECK(parsed.cfl == d.cfl);
    CHECK(parsed.dt_min == d.dt_min);
    CHECK(parsed.t_end == d.t_end);
    CHECK(parsed.cadence == d.cadence);
    CHECK(parsed.riccati == d.riccati);
    CHECK(parsed.out_dir == d.out_dir);
    CHECK(parsed.seed == d.seed);
    CHECK(parsed.kernel_alphas == d.kernel_alphas);
    CHECK(parsed.kernel_Ns == d.kernel_Ns);
}

TEST_CASE("config errors carry the offending line") {
    auto expect_error = [](const std::string& text, const std::string& fragment) {
        try {
            config_from_text(text, "cfg", false);
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };
    expect_error("grid.n = 512\nbogus.key = 1\n", "cfg:2");
    expect_error("grid.n = twelve\n", "expected a number for grid.n");
    expect_error("grid.n 512\n", "expected key = value");
    expect_error("initial.generator = warp\n", "unknown generator");
    expect_error("initial.amplitude = 1,2\n", "exactly 3");
    expect_error("control.cfl = 1.5\n", "cfl");
    expect_error("control.dt = 0.01\ncontrol.dt_min = 0.02\n", "dt_min");
    expect_error("diagnostics.decay_sides = up\n", "decay_sides");
}

TEST_CASE("comments and blank lines are ignored") {
    const SimConfig cfg = config_from_text(
        "# a comment\n\n  grid.n = 2048   # trailing comment\n\t\ngrid.L = 60\n", "cfg", false);
    CHECK(cfg.grid_n == 2048);
    CHECK(cfg.grid_L == 60.0);
}

TEST_CASE("environment variables override file values") {
    ::setenv("CH3LAB_GRID_N", "4096", 1);
    ::setenv("CH3LAB_RUN_T_END", "2.5", 1);
    const SimConfig cfg = config_from_text("grid.n = 512\n", "cfg", true);
    ::unsetenv("CH3LAB_GRID_N");
    ::unsetenv("CH3LAB_RUN_T_END");
    CHECK(cfg.grid_n == 4096);
    CHECK(cfg.t_end == 2.5);
}

TEST_CASE("build_initial_state covers the generator library") {
    SimConfig cfg;
    cfg.grid_n = 256;
    cfg.grid_L = 20.0;

    cfg.generator = "zero";
    CHECK(max_abs(build_initial_state(cfg).u) == 0.0);

    cfg.generator = "gaussian_triple";
    StateTriple gz = build_initial_state(cfg);
    CHECK(max_abs(gz.u) == doctest::Approx(cfg.amplitude[0]).epsilon(1e-3));

    cfg.generator = "sech_triple";
    StateTriple sz = build_initial_state(cfg);
    CHECK(max_abs(sz.u) == doctest::Approx(cfg.amplitude[0]).epsilon(1e-12));

    cfg.generator = "potential_sech";
    StateTriple pz = build_initial_state(cfg);
    auto pot = potentials(pz);
    // The constructed momentum is the sech profile itself.
    double err = 0.0;
    for (std::size_t i = 0; i < pot.m.size(); ++i)
        err = std::max(err, std::abs(pot.m[i] - cfg.amplitude[0] /
                                                    std::cosh(cfg.tail_rate * pot.m.grid->node(i))));
    CHECK(err < 1e-10);

    cfg.generator = "peakon";
    cfg.mollify_epsilon = 0.5;
    StateTriple pk = build_initial_state(cfg);
    CHECK(max_abs(pk.u) < 1.0);
    CHECK(max_abs(pk.u) > 0.8);
    cfg.mollify_epsilon = 0.0;

    cfg.generator = "steep_front";
    CHECK(min_value(build_initial_state(cfg).u) < 0.0);
}

TEST_CASE("random_smooth is deterministic in the seed") {
    SimConfig cfg;
    cfg.grid_n = 256;
    cfg.grid_L = 20.0;
    cfg.generator = "random_smooth";
    cfg.seed = 777;
    StateTriple a = build_initial_state(cfg);
    StateTriple b = build_initial_state(cfg);
    for (std::size_t i = 0; i < a.u.size(); ++i) CHECK(a.u[i] == b.u[i]);
    cfg.seed = 778;
    StateTriple c = build_initial_state(cfg);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.u.size(); ++i)
        diff = std::max(diff, std::abs(a.u[i] - c.u[i]));
    CHECK(diff > 1e-3);
}
