#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "branchlap/analysis.hpp"
#include "branchlap/eigensolver.hpp"

using namespace branchlap;

namespace {
constexpr double kPi = std::numbers::pi;

DecayProfile synthetic(double beta, double j0 = 1.0, int n = 201) {
    DecayProfile p;
    p.kind = DecayProfile::Kind::J_subregion;
    p.x0 = uniform_grid(0.0, 1.0, n);
    for (double x : p.x0) p.values.push_back(j0 * std::exp(-beta * x));
    return p;
}
}  // namespace

TEST_CASE("uniform_grid endpoints and spacing") {
    auto g = uniform_grid(0.0, 1.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(g[2] == doctest::Approx(0.5));
    CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 1), AnalysisError);
}

TEST_CASE("MeshLocator reproduces linear fields exactly") {
    Mesh m = generate(build_catalog_domain('a'), 0.15);
    MeshLocator loc(m);
    std::vector<double> u(m.nodes.size());
    for (size_t i = 0; i < m.nodes.size(); ++i) u[i] = 2.0 * m.nodes[i].x + 3.0 * m.nodes[i].y;
    // the basic square spans [-1,0] x [0,1], the branch [0,1] x [3/8,5/8]
    for (Vec2 p : {Vec2{-0.7, 0.7}, Vec2{-0.01, 0.5}, Vec2{0.7, 0.45}, Vec2{0.999, 0.6}}) {
        REQUIRE(loc.find(p) >= 0);
        CHECK(loc.interpolate(u, p) == doctest::Approx(2.0 * p.x + 3.0 * p.y).epsilon(1e-12));
    }
    CHECK(loc.find({0.5, 0.9}) < 0);   // above the branch
    CHECK(loc.find({-1.2, 0.5}) < 0);  // outside everything
}

TEST_CASE("profile_J of the constant field is the clipped branch area") {
    DomainSpec spec = build_catalog_domain('a');
    Mesh m = generate(spec, 0.15);
    m = refine(m);
    std::vector<double> u(m.nodes.size(), 1.0);
    auto grid = uniform_grid(0.0, 1.0, 101);
    DecayProfile J = profile_J(m, u, 0.0, 1, spec, grid);
    CHECK(J.values.front() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(J.values[40] == doctest::Approx(0.25 * 0.6).epsilon(1e-12));
    CHECK(J.values.back() == doctest::Approx(0.0));
    // literal per-triangle rule converges to the same area but is steppy
    DecayProfile Jlit = profile_J(m, u, 0.0, 1, spec, grid, true);
    CHECK(Jlit.values[40] == doctest::Approx(J.values[40]).epsilon(0.05));
}

TEST_CASE("profile_I of the constant field is the section length") {
    DomainSpec spec = build_catalog_domain('f');
    Mesh m = generate(spec, 0.15);
    m = refine(m);
    std::vector<double> u(m.nodes.size(), 1.0);
    auto grid = uniform_grid(0.0, 1.0, 11);
    DecayProfile I = profile_I(m, u, 0.0, 1, spec, grid);
    // both half-sections count inside the cut, the full section beyond it
    CHECK(I.values[2] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(I.values[8] == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("decay-rate fits recover synthetic rates") {
    const double beta = 17.0;
    DecayProfile p = synthetic(beta);
    FitResult f = fit_decay_rate(p);
    CHECK(f.rate == doctest::Approx(beta).epsilon(1e-6));
    CHECK(f.r2 == doctest::Approx(1.0));
    FitResult w = fit_decay_rate_window(p, 0.2, 0.8);
    CHECK(w.rate == doctest::Approx(beta).epsilon(1e-9));
    CHECK(w.x_lo >= 0.2);
    CHECK(w.x_hi <= 0.8);

    // finite-branch shape: values follow F_beta, plain slope is biased
    DecayProfile fin;
    fin.x0 = uniform_grid(0.0, 1.0, 201);
    const double bfin = 6.0;
    for (double x : fin.x0) {
        const double d = 1.0 - x;
        fin.values.push_back(std::sinh(bfin * d) / (2.0 * bfin) - d / 2.0);
    }
    FitResult g = fit_decay_rate_finite(fin, 1.0);
    CHECK(g.rate == doctest::Approx(bfin).epsilon(1e-4));
    FitResult plain = fit_decay_rate(fin);
    CHECK(std::abs(plain.rate - bfin) / bfin > 0.2);  // why the sinh fit exists
}

TEST_CASE("bound_report separates hard and sharp violations") {
    DomainSpec spec = build_catalog_domain('a');
    ThresholdReport th = threshold(spec, 101);
    const double lambda = 100.0;
    const double gamma = std::sqrt(th.mu - lambda);

    DecayProfile sharp = synthetic(2.0 * gamma);
    sharp.lambda = lambda;
    BoundReport ok = bound_report(sharp, th);
    CHECK(ok.applicable);
    CHECK(ok.sharp_rate_proven);
    CHECK(ok.gamma == doctest::Approx(gamma));
    CHECK(ok.violations.empty());
    CHECK(ok.sharp_violations.empty());
    CHECK(ok.fitted_rate == doctest::Approx(2.0 * gamma).epsilon(1e-6));

    DecayProfile slow = synthetic(0.5 * std::sqrt(2.0) * gamma);
    slow.lambda = lambda;
    BoundReport bad = bound_report(slow, th);
    CHECK(!bad.violations.empty());

    DecayProfile above = synthetic(2.0);
    above.lambda = th.mu + 10.0;
    BoundReport na = bound_report(above, th);
    CHECK(!na.applicable);
    CHECK(na.hard_bound.empty());
}

TEST_CASE("maslov_check passes for exponentials and fails for constants") {
    const double gamma = 3.0;
    DecayProfile I;
    I.kind = DecayProfile::Kind::I_cross_section;
    I.x0 = uniform_grid(0.0, 1.0, 201);
    for (double x : I.x0) I.values.push_back(std::exp(-2.0 * gamma * x));
    MaslovReport good = maslov_check(I, gamma, 4.0);
    CHECK(good.pass_fraction == doctest::Approx(1.0));

    DecayProfile flat;
    flat.x0 = I.x0;
    flat.values.assign(I.x0.size(), 1.0);
    MaslovReport bad = maslov_check(flat, gamma, 4.0);
    CHECK(bad.pass_fraction == doctest::Approx(0.0));
}

TEST_CASE("symmetry classification on the centered rectangular branch") {
    DomainSpec spec = build_catalog_domain('a');
    Mesh m = generate(spec, 0.15);
    for (int i = 0; i < 2; ++i) m = refine(m);
    ModeSet set = solve_modes(m, BoundaryCondition::all_dirichlet(), 3);
    const Line axis{{0.0, 0.5}, {1.0, 0.0}};
    SymmetryReport r1 = symmetry_classify(m, set.modes[0].u, spec, axis);
    SymmetryReport r2 = symmetry_classify(m, set.modes[1].u, spec, axis);
    SymmetryReport r3 = symmetry_classify(m, set.modes[2].u, spec, axis);
    CHECK(r1.cls == Symmetry::Symmetric);
    CHECK(r2.cls == Symmetry::Symmetric);
    CHECK(r3.cls == Symmetry::Antisymmetric);

    // the shifted channel is not symmetric about y = 1/2
    DomainSpec shifted = build_catalog_domain('c');
    CHECK_THROWS_AS(symmetry_classify(m, set.modes[0].u, shifted, axis), AnalysisError);
}

TEST_CASE("domain monotonicity of the first eigenvalue") {
    RayleighReport rep = rayleigh_check(build_catalog_domain('a'), 3, 12);
    CHECK(rep.kappa1 == doctest::Approx(2.0 * kPi * kPi).epsilon(0.005));
    CHECK(rep.lambda1 < rep.kappa1);
    CHECK(rep.pass);
    CHECK(rep.basic_below_mu == 8);
    CHECK(rep.full_below_mu == 9);
    CHECK(rep.count_pass);
}

TEST_CASE("bifurcation criterion against the closed form") {
    BifurcationReport tall = bifurcation_criterion(0.25, 1.0, 0.25);
    CHECK(tall.nu1 == doctest::Approx(5.0 * kPi * kPi));
    CHECK(tall.mu == doctest::Approx(16.0 * kPi * kPi));
    CHECK(!tall.pass);
    CHECK(tall.nu1_fem == doctest::Approx(tall.nu1).epsilon(0.01));

    BifurcationReport boxy = bifurcation_criterion(0.25, 0.25, 0.25);
    CHECK(boxy.nu1 == doctest::Approx(20.0 * kPi * kPi));
    CHECK(boxy.pass);
}

TEST_CASE("profile CSV layout") {
    DecayProfile J = synthetic(5.0, 2.0, 6);
    J.lambda = 100.0;
    ThresholdReport th = threshold(build_catalog_domain('a'), 51);
    BoundReport rep = bound_report(J, th);
    std::ostringstream os;
    write_profile_csv(os, J, &rep, nullptr);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x0,J,hard_bound,sharp_bound");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 6);
}
