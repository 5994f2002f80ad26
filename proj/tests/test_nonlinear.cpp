#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kdvduo/nonlinear.hpp"
#include "test_util.hpp"

using namespace kdvduo;
using namespace kdvduo::testutil;

TEST_CASE("nonlinearity slice evaluation") {
    const Grid g(1.0, 1.0, 41, 10);

    SUBCASE("zero state and zero coefficients") {
        const ValidatedParams p = reference_params(1.0, 1.0);
        const StatePair z = nonlinearity(p, StatePair::zero(g.nx), g);
        CHECK(z.u.cwiseAbs().maxCoeff() == 0.0);
        CHECK(z.v.cwiseAbs().maxCoeff() == 0.0);

        const ValidatedParams p0 = make_params(0.5, 1.0, 1.0, 0.0, 0.0, 0.0);
        std::mt19937_64 rng(3);
        const StatePair s = random_band_state(g, rng);
        const StatePair out = nonlinearity(p0, s, g);
        CHECK(out.u.cwiseAbs().maxCoeff() == 0.0);
        CHECK(out.v.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("linear fields differentiate exactly") {
        const ValidatedParams p = make_params(0.0, 1.0, 1.0, 0.0, 1.0, 1.0);
        StatePair s = StatePair::zero(g.nx);
        for (int i = 0; i < g.nx; ++i) s.u[i] = s.v[i] = g.x(i);
        const StatePair out = nonlinearity(p, s, g);
        // f = -v v_x - (uv)_x = -x - 2x = -3x, same for s, exact on interior nodes
        for (int i = 1; i < g.nx - 1; ++i) {
            CHECK(out.u[i] == doctest::Approx(-3.0 * g.x(i)).epsilon(1e-12));
            CHECK(out.v[i] == doctest::Approx(-3.0 * g.x(i)).epsilon(1e-12));
        }
    }
}

TEST_CASE("nonlinear solver basics") {
    SUBCASE("zero data settles immediately") {
        const ValidatedParams p = reference_params(1.0, 1.0);
        const Grid g(1.0, 0.5, 41, 50);
        NonlinearRun run = solve_nonlinear(p, g, StatePair::zero(g.nx), BoundaryData::zero(g.nt));
        CHECK(run.iterations == 1);
        for (const auto& sl : run.trajectory.slices) CHECK(sl.u.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("vanishing nonlinear coefficients reproduce the linear solve") {
        const ValidatedParams p = reference_params(0.0, 0.0);
        const Grid g(1.0, 0.5, 61, 80);
        std::mt19937_64 rng(5);
        const StatePair init = random_compatible_state(g, rng);
        BoundaryData bd = BoundaryData::zero(g.nt);
        bd[Channel::H2] = random_series(g, rng);
        NonlinearRun nl = solve_nonlinear(p, g, init, bd);
        ForwardRun lin = solve_forward_linear(p, g, init, bd);
        CHECK(nl.iterations == 1);
        double diff = 0.0;
        for (int n = 0; n <= g.nt; ++n)
            diff = std::max(diff, (nl.trajectory.slices[n].u - lin.trajectory.slices[n].u)
                                      .cwiseAbs()
                                      .maxCoeff());
        CHECK(diff <= 1e-13);
    }
    SUBCASE("manufactured solution with appended source converges at order two") {
        const ValidatedParams p = reference_params(1.0, 1.0);
        auto nl_err = [&](int nx, int nt) {
            const Grid g(1.0, 0.5, nx, nt);
            Manufactured mms{p, g};
            const double amp = 1e-2;
            // residual source so amp * (u*, v*) solves the nonlinear system
            SourcePair extra;
            extra.slices.reserve(g.nt + 1);
            for (int n = 0; n <= g.nt; ++n) {
                StatePair sl = StatePair::zero(g.nx);
                StatePair state = StatePair::zero(g.nx);
                for (int i = 0; i < g.nx; ++i) {
                    const double x = g.x(i), t = g.t(n);
                    sl.u[i] = amp * mms.f(x, t);
                    sl.v[i] = amp * mms.s(x, t);
                    state.u[i] = amp * mms.u(x, t);
                    state.v[i] = amp * mms.v(x, t);
                }
                // subtract the discrete-consistent nonlinear terms analytically
                for (int i = 0; i < g.nx; ++i) {
                    const double x = g.x(i), t = g.t(n);
                    const double uu = amp * mms.u(x, t), vv = amp * mms.v(x, t);
                    const double ux = amp * mms.ux(x, t), vx = amp * mms.vx(x, t);
                    const double uvx = uu * vx + ux * vv;
                    sl.u[i] -= -p.a1() * vv * vx - p.a2() * uvx;
                    sl.v[i] -= -(p.a2() * p.b() / p.c()) * uu * ux -
                               (p.a1() * p.b() / p.c()) * uvx;
                }
                extra.slices.push_back(std::move(sl));
            }
            BoundaryData bd = BoundaryData::zero(g.nt);
            StatePair init = StatePair::zero(g.nx);
            for (int n = 0; n <= g.nt; ++n) {
                const double t = g.t(n);
                bd[Channel::H0][n] = amp * mms.u(0.0, t);
                bd[Channel::H1][n] = amp * mms.u(g.L, t);
                bd[Channel::H2][n] = amp * mms.ux(g.L, t);
                bd[Channel::G0][n] = amp * mms.v(0.0, t);
                bd[Channel::G1][n] = amp * mms.v(g.L, t);
                bd[Channel::G2][n] = amp * mms.vx(g.L, t);
            }
            for (int i = 0; i < g.nx; ++i) {
                init.u[i] = amp * mms.u(g.x(i), 0.0);
                init.v[i] = amp * mms.v(g.x(i), 0.0);
            }
            NonlinearRun run = solve_nonlinear(p, g, init, bd, {}, extra);
            double err = 0.0;
            for (int n = 0; n <= g.nt; ++n)
                for (int i = 0; i < g.nx; ++i) {
                    err = std::max(err, std::abs(run.trajectory.slices[n].u[i] -
                                                 amp * mms.u(g.x(i), g.t(n))));
                    err = std::max(err, std::abs(run.trajectory.slices[n].v[i] -
                                                 amp * mms.v(g.x(i), g.t(n))));
                }
            return err;
        };
        const double e1 = nl_err(41, 100);
        const double e2 = nl_err(81, 400);
        CHECK(std::log2(e1 / e2) > 1.8);
    }
    SUBCASE("picard differences decay geometrically once converging") {
        const ValidatedParams p = reference_params(1.0, 1.0);
        const Grid g(1.0, 1.0, 61, 150);
        std::mt19937_64 rng(7);
        StatePair init = random_compatible_state(g, rng);
        init.u *= 0.05;
        init.v *= 0.05;
        PicardSettings set;
        set.tol = 1e-12;
        NonlinearRun run = solve_nonlinear(p, g, init, BoundaryData::zero(g.nt), set);
        REQUIRE(run.picard_differences.size() >= 3);
        const auto& d = run.picard_differences;
        for (std::size_t i = d.size() - 3; i < d.size(); ++i)
            if (d[i - 1] > 0.0) CHECK(d[i] / d[i - 1] < 1.0);
    }
    SUBCASE("no blow-up at small amplitude") {
        const ValidatedParams p = reference_params(1.0, 1.0);
        const Grid g(1.0, 2.0, 61, 200);
        std::mt19937_64 rng(9);
        StatePair init = random_compatible_state(g, rng);
        const double scale = 1e-2 / std::max(1e-12, x_norm(init, p, g));
        init.u *= scale;
        init.v *= scale;
        NonlinearRun run = solve_nonlinear(p, g, init, BoundaryData::zero(g.nt));
        CHECK(x_norm(run.trajectory.terminal(), p, g) <= 2.0 * x_norm(init, p, g) + 1e-12);
    }
}

TEST_CASE("duhamel endpoint") {
    const Grid g(1.0, 0.5, 41, 60);

    SUBCASE("zero trajectory and vanishing coefficients give zero") {
        const ValidatedParams p = reference_params(1.0, 1.0);
        Trajectory zero;
        zero.slices.assign(g.nt + 1, StatePair::zero(g.nx));
        CHECK(duhamel_endpoint(p, g, zero).u.cwiseAbs().maxCoeff() == 0.0);

        const ValidatedParams p0 = make_params(0.5, 1.0, 1.0, 0.0, 0.0, 0.0);
        std::mt19937_64 rng(11);
        Trajectory traj;
        for (int n = 0; n <= g.nt; ++n) traj.slices.push_back(random_band_state(g, rng));
        CHECK(duhamel_endpoint(p0, g, traj).u.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("nonlinear terminal = linear terminal minus duhamel endpoint") {
        const ValidatedParams p = reference_params(1.0, 1.0);
        std::mt19937_64 rng(13);
        StatePair init = random_compatible_state(g, rng);
        init.u *= 0.05;
        init.v *= 0.05;
        BoundaryData bd = BoundaryData::zero(g.nt);
        bd[Channel::G2] = 0.02 * random_series(g, rng);

        NonlinearRun nl = solve_nonlinear(p, g, init, bd);
        ForwardRun lin = solve_forward_linear(p, g, init, bd);
        const StatePair duh = duhamel_endpoint(p, g, nl.trajectory);
        const StatePair expect(lin.trajectory.terminal().u - duh.u,
                               lin.trajectory.terminal().v - duh.v);
        const StatePair got = nl.trajectory.terminal();
        CHECK((got.u - expect.u).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((got.v - expect.v).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("nonlinear control") {
    const Grid g(1.0, 2.0, 61, 150);

    SUBCASE("zero problem synthesizes zero controls") {
        const ValidatedParams p = reference_params(1.0, 1.0);
        NonlinearControlSolution sol = control_nonlinear(
            p, g, ControlConfig::four(), StatePair::zero(g.nx), StatePair::zero(g.nx));
        for (Channel ch : kChannels) CHECK(sol.controls[ch].cwiseAbs().maxCoeff() == 0.0);
        CHECK(sol.report.terminal_error == 0.0);
    }
    SUBCASE("vanishing nonlinear coefficients reduce to the linear control") {
        const ValidatedParams p = reference_params(0.0, 0.0);
        StatePair target = StatePair::zero(g.nx);
        for (int i = 0; i < g.nx; ++i)
            target.u[i] = 1e-2 * std::sin(std::numbers::pi * g.x(i) / g.L);
        NonlinearControlSolution nls = control_nonlinear(
            p, g, ControlConfig::four(), StatePair::zero(g.nx), target, {}, 1e-4, 300, 20);
        HumOptions opt;
        opt.tol = 1e-4;
        HumSolution lin = solve_hum(p, g, ControlConfig::four(), StatePair::zero(g.nx), target, opt);
        for (Channel ch : kChannels)
            CHECK((nls.controls[ch] - lin.controls[ch]).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(nls.report.terminal_error ==
              doctest::Approx(lin.report.terminal_error).epsilon(1e-9));
    }
    SUBCASE("small-amplitude steering converges with a closed loop") {
        const ValidatedParams p = reference_params(1.0, 1.0);
        StatePair target = StatePair::zero(g.nx);
        for (int i = 0; i < g.nx; ++i)
            target.u[i] = 1e-2 * std::sin(std::numbers::pi * g.x(i) / g.L);
        PicardSettings set;
        set.tol = 1e-10;
        NonlinearControlSolution sol = control_nonlinear(
            p, g, ControlConfig::four(), StatePair::zero(g.nx), target, set, 1e-4, 300, 20);
        CHECK(sol.report.outer_iterations <= 20);
        CHECK(sol.report.terminal_error <= 1e-3 * x_norm(target, p, g));

        // closure: replay through an independent nonlinear solve
        NonlinearRun replay = solve_nonlinear(p, g, StatePair::zero(g.nx), sol.controls, set);
        const double err = x_norm(StatePair(replay.trajectory.terminal().u - target.u,
                                            replay.trajectory.terminal().v - target.v),
                                  p, g);
        CHECK(err == doctest::Approx(sol.report.terminal_error).epsilon(1e-12));
    }
}
