#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "evolution.hpp"
#include "forcing.hpp"
#include "norms.hpp"
#include "operators.hpp"
#include "test_util.hpp"

using namespace bsq;
using namespace bsqtest;

namespace {

const BoxSpec kSmall{2.0 * M_PI, 8, 2.0 / 3.0};
const BoxSpec kDesk{2.0 * M_PI * 16.0, 32, 2.0 / 3.0};

ForceSpec force(double amp, double s, std::uint64_t seed, double r = 1.0) {
    ForceSpec spec;
    spec.radius_r = r;
    spec.sobolev_exponent_s = s;
    spec.amplitude = amp;
    spec.seed = seed;
    return spec;
}

ScalarField single_mode(const BoxSpec& box, double h1_amplitude) {
    ScalarField f(box);
    f.at(1, 0, 0) = Complex{1.0, 0.0};
    f.at(-1, 0, 0) = Complex{1.0, 0.0};
    f *= h1_amplitude / h1_norm(f);
    return f;
}

} // namespace

TEST_CASE("compute_T0 formulas") {
    SUBCASE("delta0 = 1/9, eta0 = 1/3 gives T0 = 1/2 exactly") {
        // Build data with exactly those norms: single modes at |xi| = 1.
        VectorField v0(kSmall);
        v0.comp[0] = single_mode(kSmall, 1.0 / 9.0);
        VectorField gvec(kSmall);
        {
            ScalarField s(kSmall);
            s.at(1, 0, 0) = Complex{1.0, 0.0};
            s.at(-1, 0, 0) = Complex{1.0, 0.0};
            s *= (1.0 / 3.0) / sobolev_norm(s, 0.5);
            gvec.comp[2] = s;
        }
        const auto c = compute_T0(v0, ScalarField(kSmall), VectorField(kSmall), ScalarField(kSmall), gvec, 1.0);
        CHECK(c.delta0 == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
        CHECK(c.eta0 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
        CHECK(c.T0 == doctest::Approx(0.5).epsilon(1e-13));
    }

    SUBCASE("all-zero data gives T0 = 1/2 through the min's 1-branch") {
        const auto c = compute_T0(VectorField(kSmall), ScalarField(kSmall), VectorField(kSmall),
                                  ScalarField(kSmall), VectorField(kSmall), 1.0);
        CHECK(c.T0 == 0.5);
    }

    SUBCASE("delta0 = 2/9, eta0 = 0 gives T0 = 1/32") {
        VectorField v0(kSmall);
        v0.comp[0] = single_mode(kSmall, 2.0 / 9.0);
        const auto c = compute_T0(v0, ScalarField(kSmall), VectorField(kSmall), ScalarField(kSmall),
                                  VectorField(kSmall), 1.0);
        CHECK(c.T0 == doctest::Approx(1.0 / 32.0).epsilon(1e-13));
    }
}

TEST_CASE("compute_T1") {
    SUBCASE("zero data: T1 = 1/2 and rho = r/3") {
        const auto c = compute_T1(VectorField(kSmall), ScalarField(kSmall), VectorField(kSmall),
                                  ScalarField(kSmall), VectorField(kSmall), 1.0, 1.0,
                                  T1Mode::nonhomogeneous_uniform);
        CHECK(c.T1 == 0.5);
        CHECK(c.rho == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }

    SUBCASE("monotone: scaling any datum up never increases T1 or rho") {
        const double r = 1.0;
        std::vector<double> scales{1.0, 2.0, 4.0};
        double prevT1 = 1e300, prevRho = 1e300, prevT0 = 1e300;
        for (double sf : scales) {
            const VectorField f = make_gevrey_vector(force(1e-2 * sf, -1.0, 3, r), kDesk, true);
            const ScalarField g = make_gevrey_scalar(force(1e-2, -1.0, 5, r), kDesk);
            const VectorField gvec = make_gevrey_vector(force(1.0, 0.5, 7, r), kDesk, false);
            const auto c = compute_T1(VectorField(kDesk), ScalarField(kDesk), f, g, gvec, r, 1.0,
                                      T1Mode::nonhomogeneous_uniform);
            CHECK(c.T0 <= prevT0 * (1.0 + 1e-14));
            CHECK(c.T1 <= prevT1 * (1.0 + 1e-14));
            CHECK(c.rho <= prevRho * (1.0 + 1e-14));
            CHECK(c.T1 <= c.T0);
            prevT0 = c.T0;
            prevT1 = c.T1;
            prevRho = c.rho;
        }
    }

    SUBCASE("factory data: rho < 2r/3 and finite constants") {
        const double r = 1.0;
        const VectorField f = make_gevrey_vector(force(1e-2, -1.0, 11, r), kDesk, true);
        const ScalarField g = make_gevrey_scalar(force(1e-2, -1.0, 13, r), kDesk);
        const VectorField gvec = make_gevrey_vector(force(1e-2, 0.5, 17, r), kDesk, false);
        const auto c =
            compute_T1(VectorField(kDesk), ScalarField(kDesk), f, g, gvec, r, 1.0, T1Mode::nonhomogeneous_uniform);
        CHECK(c.rho > 0.0);
        CHECK(c.rho < 2.0 * r / 3.0);
        CHECK(c.T1 <= c.T0);
        CHECK(c.T0 <= 0.5);
    }

    SUBCASE("data outside the Gevrey class at radius r raises an error") {
        // Envelope decays at radius 0.3 only; measuring at r = 2 overflows on
        // the desk lattice once N is large enough to expose the growth.
        const BoxSpec box{2.0 * M_PI, 32, 2.0 / 3.0};
        const ScalarField g = random_scalar(box, 19, [](double a) { return std::exp(-0.3 * a) * 1e200; });
        const double gn = gevrey_norm(g, -1.0, 40.0);
        CHECK(std::isinf(gn));
        CHECK_THROWS_AS(compute_T1(VectorField(box), ScalarField(box), VectorField(box), g, VectorField(box),
                                   40.0, 1.0, T1Mode::nonhomogeneous_uniform),
                        Error);
    }

    SUBCASE("homogeneous variant depends on the solution norms") {
        const VectorField u0 = make_gevrey_vector(force(1e-2, 1.0, 23), kDesk, true);
        const ScalarField th0 = make_gevrey_scalar(force(1e-2, 1.0, 29), kDesk);
        const VectorField gvec = make_gevrey_vector(force(1.0, 0.5, 31), kDesk, false);
        const auto c1 = compute_T1(u0, th0, VectorField(kDesk), ScalarField(kDesk), gvec, 1.0, 1.0,
                                   T1Mode::homogeneous);
        const auto c2 = compute_T1(2.0 * u0, th0, VectorField(kDesk), ScalarField(kDesk), gvec, 1.0, 1.0,
                                   T1Mode::homogeneous);
        CHECK(c2.delta1 > c1.delta1);
        CHECK(c2.T1 <= c1.T1);
    }
}

TEST_CASE("heat propagation") {
    const ScalarField f = random_scalar(kSmall, 37);

    SUBCASE("dt = 0 is the identity") {
        CHECK(max_coeff_diff(f, heat_propagate(f, 0.0)) == 0.0);
    }

    SUBCASE("single mode at |xi| = 1 decays by e^{-t}") {
        const ScalarField s = single_mode(kSmall, 1.0);
        const ScalarField h = heat_propagate(s, 1.0);
        CHECK(std::abs(h.at(1, 0, 0)) ==
              doctest::Approx(std::abs(s.at(1, 0, 0)) * std::exp(-1.0)).epsilon(1e-13));
    }

    SUBCASE("semigroup property to 1e-13") {
        const ScalarField two_step = heat_propagate(heat_propagate(f, 0.3), 0.45);
        const ScalarField one_step = heat_propagate(f, 0.75);
        CHECK(max_coeff_diff(two_step, one_step) <= 1e-13 * max_abs_coeff(f));
    }

    SUBCASE("negative dt rejected") { CHECK_THROWS_AS(heat_propagate(f, -0.1), Error); }
}

TEST_CASE("duhamel quadrature") {
    const TimeGrid grid{1.0, 16};

    SUBCASE("zero integrand integrates to zero") {
        std::vector<ScalarField> nodes(grid.num_nodes(), ScalarField(kSmall));
        CHECK(max_abs_coeff(duhamel_integral(nodes, grid, grid.steps)) == 0.0);
    }

    SUBCASE("constant single-mode integrand has the (1 - e^{-t}) closed form") {
        const ScalarField n0 = single_mode(kSmall, 1.0); // |xi| = 1
        std::vector<ScalarField> nodes(grid.num_nodes(), n0);
        for (int m : {4, 8, 16}) {
            const double t = grid.node(m);
            const ScalarField J = duhamel_integral(nodes, grid, m);
            const double expect = (1.0 - std::exp(-t)) * std::abs(n0.at(1, 0, 0));
            CHECK(std::abs(J.at(1, 0, 0)) == doctest::Approx(expect).epsilon(1e-12));
        }
    }

    SUBCASE("linear-in-time integrand matches the psi2 closed form to 1e-10") {
        const ScalarField base = single_mode(kSmall, 1.0);
        std::vector<ScalarField> nodes;
        for (int m = 0; m < grid.num_nodes(); ++m) nodes.push_back((1.0 + 2.0 * grid.node(m)) * base);
        const double t = 1.0, lam = 1.0;
        const ScalarField J = duhamel_integral(nodes, grid, grid.steps);
        // int_0^t e^{-(t-tau)}(1 + 2 tau) dtau = (1 - e^{-t}) + 2(t - 1 + e^{-t}).
        const double expect =
            ((1.0 - std::exp(-lam * t)) + 2.0 * (t - 1.0 + std::exp(-t))) * std::abs(base.at(1, 0, 0));
        CHECK(std::abs(J.at(1, 0, 0)) == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("picard mild solve") {
    SUBCASE("all-zero data gives the zero trajectory in one iteration") {
        const auto run = picard_mild_solve(VectorField(kSmall), ScalarField(kSmall), VectorField(kSmall),
                                           ScalarField(kSmall), VectorField(kSmall), 0.5, 8);
        CHECK(run.iterations == 1);
        CHECK(run.traj.e_t_norm() == 0.0);
    }

    SUBCASE("theta-free data: theta channel stays exactly zero") {
        const VectorField f = make_gevrey_vector(force(1e-2, -1.0, 41), kSmall, true);
        const VectorField v0 = make_gevrey_vector(force(1e-2, 1.0, 43), kSmall, true);
        const auto run = picard_mild_solve(v0, ScalarField(kSmall), f, ScalarField(kSmall),
                                           VectorField(kSmall), 0.25, 16);
        for (const auto& th : run.traj.th) CHECK(max_abs_coeff(th) == 0.0);
        for (const auto& v : run.traj.v) CHECK(divergence_linf(v) <= 1e-12 * std::max(max_abs_coeff(v), 1e-300));
    }

    SUBCASE("small data: geometric convergence inside the 3 delta0 ball") {
        const VectorField f = make_gevrey_vector(force(1e-2, -1.0, 47), kDesk, true);
        const ScalarField g = make_gevrey_scalar(force(1e-2, -1.0, 53), kDesk);
        const VectorField gvec = make_gevrey_vector(force(1e-1, 0.5, 59), kDesk, false);
        const VectorField v0 = make_gevrey_vector(force(1e-2, 1.0, 61), kDesk, true);
        const ScalarField th0 = make_gevrey_scalar(force(1e-2, 1.0, 67), kDesk);

        const auto c = compute_T0(v0, th0, f, g, gvec, 1.0);
        const auto run = picard_mild_solve(v0, th0, f, g, gvec, c.T0, 32);
        CHECK(!run.beyond_T0);
        CHECK(run.ball_checked);
        for (double n : run.iterate_norms) CHECK(n <= 3.0 * run.delta0 * (1.0 + 1e-9));
        // successive distances shrink geometrically
        for (std::size_t i = 1; i < run.distances.size(); ++i)
            CHECK(run.distances[i] <= 0.9 * run.distances[i - 1] + 1e-16);
    }
}

TEST_CASE("bilinear and linear form measurements") {
    const BoxSpec box{2.0 * M_PI, 16, 2.0 / 3.0};

    SUBCASE("exact homogeneity under e -> 2e") {
        const TimeGrid grid{0.25, 8};
        VectorField v = random_divfree_vector(box, 71);
        ScalarField th = random_scalar(box, 73);
        Trajectory e;
        e.grid = grid;
        e.v.assign(grid.num_nodes(), v);
        e.th.assign(grid.num_nodes(), th);

        Trajectory e2;
        e2.grid = grid;
        e2.v.assign(grid.num_nodes(), 2.0 * v);
        e2.th.assign(grid.num_nodes(), 2.0 * th);

        const double b1 = eval_bilinear(e).e_t_norm();
        const double b2 = eval_bilinear(e2).e_t_norm();
        CHECK(b2 == 4.0 * b1); // power-of-two scaling is exact in fp

        const VectorField gvec = make_gevrey_vector(force(0.5, 0.5, 79), box, false);
        const double l1 = eval_linear(e, gvec).e_t_norm();
        const double l2 = eval_linear(e2, gvec).e_t_norm();
        CHECK(l2 == 2.0 * l1);
    }

    SUBCASE("gvec = 0 makes L identically zero") {
        const TimeGrid grid{0.25, 8};
        Trajectory e;
        e.grid = grid;
        e.v.assign(grid.num_nodes(), random_divfree_vector(box, 83));
        e.th.assign(grid.num_nodes(), random_scalar(box, 89));
        CHECK(eval_linear(e, VectorField(box)).e_t_norm() == 0.0);
    }

    SUBCASE("measured scaling exponents sit in the lemma windows") {
        const BoxSpec mbox{2.0 * M_PI, 32, 2.0 / 3.0};
        const std::vector<double> T{1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2};
        const auto fitB = measure_bilinear_constant(mbox, T, 4, 99);
        CHECK(fitB.slope >= 0.15);
        CHECK(fitB.slope <= 0.35);

        ForceSpec gs = force(1.0, 0.5, 7, 0.5);
        const VectorField gvec = make_gevrey_vector(gs, mbox, false);
        const auto fitL = measure_linear_constant(mbox, gvec, T, 4, 99);
        CHECK(fitL.slope >= 0.4);
        CHECK(fitL.slope <= 0.6);
    }
}

TEST_CASE("heat lemma ratios") {
    SUBCASE("time-constant single mode: ratio is (1 - e^{-t |xi|^2})/(t |xi|^2)") {
        const TimeGrid grid{1.0, 32};
        const ScalarField n0 = single_mode(kSmall, 1.0);
        std::vector<ScalarField> nodes(grid.num_nodes(), n0);
        const ScalarField J = duhamel_integral(nodes, grid, grid.steps);
        const double ratio = h1_norm(J) / (1.0 * h1_norm(n0));
        CHECK(ratio == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-10));
        CHECK(ratio <= 1.0);
    }

    SUBCASE("random trials: first ratio <= 2, stable across resolutions") {
        const BoxSpec a{2.0 * M_PI, 8, 2.0 / 3.0};
        const BoxSpec b{2.0 * M_PI, 16, 2.0 / 3.0};
        const auto ra = heat_lemma_check(a, 25, 7);
        const auto rb = heat_lemma_check(b, 25, 7);
        CHECK(ra.max_ratio_h1 <= 2.0);
        CHECK(rb.max_ratio_h1 <= 2.0);
        CHECK(std::isfinite(ra.max_ratio_l2));
        CHECK(std::isfinite(rb.max_ratio_l2));
        CHECK(std::abs(ra.max_ratio_h1 - rb.max_ratio_h1) <= 0.2 * ra.max_ratio_h1);
    }
}

TEST_CASE("quadrature error budget: Richardson M vs 2M below 1e-8") {
    const VectorField f = make_gevrey_vector(force(1e-2, -1.0, 101), kDesk, true);
    const ScalarField g = make_gevrey_scalar(force(1e-2, -1.0, 103), kDesk);
    const VectorField gvec = make_gevrey_vector(force(1e-1, 0.5, 107), kDesk, false);
    const VectorField v0 = make_gevrey_vector(force(1e-2, 1.0, 109), kDesk, true);
    const ScalarField th0 = make_gevrey_scalar(force(1e-2, 1.0, 113), kDesk);

    const auto coarse = picard_mild_solve(v0, th0, f, g, gvec, 0.25, 32, 1e-12);
    const auto fine = picard_mild_solve(v0, th0, f, g, gvec, 0.25, 64, 1e-12);
    double diff = 0.0;
    for (int m = 0; m <= 32; ++m) {
        // node m of the coarse grid is node 2m of the fine grid
        diff = std::max(diff, h1_norm(coarse.traj.v[m] - fine.traj.v[2 * m]) +
                                  h1_norm(coarse.traj.th[m] - fine.traj.th[2 * m]));
    }
    CHECK(diff <= 1e-8 * std::max(coarse.traj.e_t_norm(), 1e-300));
}

TEST_CASE("stationary drift") {
    SUBCASE("zero solution with zero data does not move") {
        const double drift = stationary_drift_check(VectorField(kSmall), ScalarField(kSmall),
                                                    VectorField(kSmall), ScalarField(kSmall),
                                                    VectorField(kSmall), 0.5, 8);
        CHECK(drift == 0.0);
    }

    SUBCASE("perturbed initial data decays no faster than the heat kernel") {
        const double eps = 1e-4;
        ScalarField th0(kSmall);
        th0.at(1, 0, 0) = Complex{eps, 0.0};
        th0.at(-1, 0, 0) = Complex{eps, 0.0};
        // Homogeneous system, no forces: trajectory is pure heat decay of th0.
        const auto run = picard_mild_solve(VectorField(kSmall), th0, VectorField(kSmall), ScalarField(kSmall),
                                           VectorField(kSmall), 0.25, 16);
        const int last = run.traj.grid.num_nodes() - 1;
        const double expect = h1_norm(th0) * std::exp(-0.25); // |xi|^2 = 1
        CHECK(h1_norm(run.traj.th[last]) >= 0.99 * expect);
        CHECK(h1_norm(run.traj.th[last]) <= 1.01 * expect);
    }
}

TEST_CASE("ETD long-horizon integrator agrees with the mild solver on short horizons") {
    const VectorField gvec = make_gevrey_vector(force(1e-1, 0.5, 127), kDesk, false);
    const VectorField u0 = make_gevrey_vector(force(1e-2, 1.0, 131), kDesk, true);
    const ScalarField th0 = make_gevrey_scalar(force(1e-2, 1.0, 137), kDesk);

    const double T = 0.25;
    const auto mild = picard_mild_solve(u0, th0, VectorField(kDesk), ScalarField(kDesk), gvec, T, 32, 1e-12);

    VectorField u = u0;
    ScalarField th = th0;
    evolve_homogeneous_etd(u, th, gvec, 0.0, T, 256, nullptr);

    const int last = mild.traj.grid.num_nodes() - 1;
    const double scale = h1_norm(u0) + h1_norm(th0);
    const double diff = h1_norm(u - mild.traj.v[last]) + h1_norm(th - mild.traj.th[last]);
    CHECK(diff <= 1e-6 * scale);
}
