#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rislab/errors.hpp"
#include "rislab/routing.hpp"

using namespace rislab;

namespace {

CVector random_diagonal(int m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-oracle::pi, oracle::pi);
    CVector d(m);
    for (int i = 0; i < m; ++i) d(i) = std::polar(1.0, u(rng));
    return d;
}

RedirectiveRoute swap(int i, int j) { return {{{i, j}}, {0.0, 0.0}, {0.0, 0.0}}; }

}  // namespace

TEST_SUITE("routing") {
    TEST_CASE("disjoint swaps combine into the full permutation") {
        const RMatrix s = combine_redirective({swap(0, 1), swap(2, 3)}, 4);
        RMatrix expected(4, 4);
        expected << 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0;
        CHECK(s == expected);
        CHECK(redirective_objective(s, {swap(0, 1), swap(2, 3)}) == 0.0);
    }

    TEST_CASE("one route combines to itself") {
        const auto r = swap(1, 3);
        CHECK(combine_redirective({r}, 5) == route_permutation(r, 5));
        CHECK(r.support() == std::vector<int>{1, 3});
    }

    TEST_CASE("overlapping routes name the shared port") {
        try {
            combine_redirective({swap(0, 1), swap(1, 2)}, 4);
            FAIL("overlap accepted");
        } catch (const ConfigurationError& e) {
            CHECK(std::string(e.what()).find("port(s) 1") != std::string::npos);
        }
        CHECK_THROWS_AS(combined_redirective_load({swap(0, 1), swap(1, 2)}, 4), ConfigurationError);
    }

    TEST_CASE("combined routes stay a partial symmetric permutation") {
        const RMatrix s = combine_redirective({swap(0, 5), swap(2, 2), swap(7, 3)}, 9);
        CHECK(s == s.transpose());
        for (int i = 0; i < 9; ++i) CHECK(s.row(i).sum() <= 1.0);
        CHECK(s.cwiseAbs().sum() == 5.0);
    }

    TEST_CASE("an extra route in the load shows up in the objective") {
        const RMatrix s = combine_redirective({swap(0, 1), swap(2, 3)}, 4);
        CHECK(redirective_objective(s, {swap(0, 1)}) == 0.0);
        CHECK(redirective_objective(route_permutation(swap(0, 1), 4), {swap(0, 1), swap(2, 3)}) == 2.0);
    }

    TEST_CASE("reflective combination: single route and phasor bisector") {
        std::mt19937_64 rng(3);
        const CVector d = random_diagonal(8, rng);
        CHECK((combine_reflective(std::vector<CVector>{d}) - d).norm() < 1e-15);

        for (auto [a, b] : {std::pair{0.3, 1.7}, std::pair{-2.5, 0.4}, std::pair{3.0, 2.9}}) {
            CVector x(1), y(1);
            x(0) = std::polar(1.0, a);
            y(0) = std::polar(1.0, b);
            const cdouble c = combine_reflective(std::vector<CVector>{x, y})(0);
            CHECK(std::abs(c - std::polar(1.0, (a + b) / 2)) < 1e-14);
        }
        CVector x(1), y(1);
        x(0) = 1.0;
        y(0) = -1.0;
        CHECK(combine_reflective(std::vector<CVector>{x, y})(0) == cdouble(1.0, 0.0));
        CHECK_THROWS_AS(combine_reflective(std::vector<CVector>{}), ConfigurationError);
    }

    TEST_CASE("reflective combination is unit modulus and close to the scaled sum") {
        std::mt19937_64 rng(4);
        const int k = 4, m = 16, trials = 200;
        double mean = 0.0, baseline = 0.0;
        for (int t = 0; t < trials; ++t) {
            std::vector<CVector> routes;
            for (int r = 0; r < k; ++r) routes.push_back(random_diagonal(m, rng));
            CVector sum = CVector::Zero(m);
            for (const auto& r : routes) sum += r;
            const CVector s = combine_reflective(routes);
            for (int i = 0; i < m; ++i) CHECK(std::abs(std::abs(s(i)) - 1.0) < 1e-14);
            mean += (s - sum / std::sqrt(double(k))).norm() / sum.norm();
            baseline += (random_diagonal(m, rng) - sum / std::sqrt(double(k))).norm() / sum.norm();
        }
        mean /= trials;
        baseline /= trials;
        INFO("relative error " << mean << ", unrelated profile " << baseline);
        CHECK(mean < 0.3);
        CHECK(mean < 0.5 * baseline);
    }

    TEST_CASE("reflective route maps its incident direction coherently") {
        const ArrayGeometry g(4, 0.5);
        const Direction in{0.4, 0.2}, out{0.7, -1.9};
        const auto route = make_reflective_route(g, in, out);
        const cdouble sum = (steering_vector(g, out).transpose() * route.diagonal.asDiagonal() *
                             steering_vector(g, in))
                                .value();
        CHECK(std::abs(sum - 16.0) < 1e-12);
    }

    TEST_CASE("single route gain is one") {
        const CoupledArray array(ArrayGeometry(4, 0.5));
        const ArrayGeometry& g = array.geometry();
        const auto route = make_redirective_route(g, beam_index(g, 1, 0), beam_index(g, 0, 1));
        const CMatrix s_l = realize_load(combined_redirective_load({route}, 16), g);
        for (auto model : {ScatterModel::Exact, ScatterModel::Naive}) {
            CHECK(route_gain(array, s_l, s_l, route.incident, route.outgoing, model) == 1.0);
        }
        // Beam-domain routing: the naive amplitude is M times the embedded pattern scale.
        const double scale = g.spacing() * g.spacing() * std::sqrt(std::cos(route.incident.theta) *
                                                                   std::cos(route.outgoing.theta));
        CHECK(std::abs(path_amplitude(array, s_l, route.incident, route.outgoing, ScatterModel::Naive)) ==
              doctest::Approx(16.0 * scale).epsilon(1e-12));
        CHECK_THROWS_AS(make_redirective_route(g, beam_index(g, 2, 2), 0), ConfigurationError);
    }

    TEST_CASE("route power equals the transfer quadratic form") {
        std::mt19937_64 rng(5);
        const CoupledArray array(ArrayGeometry(4, 0.5));
        const CMatrix s_l = random_diagonal(16, rng).asDiagonal();
        const Direction in{0.3, 1.0}, out{0.6, -0.5};
        const CMatrix t = port_transfer(array, s_l, ScatterModel::Exact);
        const cdouble ref = (array.pattern(out).transpose() * t * array.pattern(in)).value();
        CHECK(route_power(array, s_l, in, out) == doctest::Approx(std::norm(ref)).epsilon(1e-12));
        const auto batch = path_amplitudes(array, s_l, {{in, out}, {out, in}}, ScatterModel::Exact);
        CHECK(std::abs(batch[0] - ref) < 1e-12);
        // Reciprocity: T is symmetric.
        CHECK(std::abs(batch[1] - ref) < 1e-12);
    }

    TEST_CASE("naive redirective route leaks nothing into other visible beams") {
        const CoupledArray array(ArrayGeometry(4, 0.5));
        const ArrayGeometry& g = array.geometry();
        const int in = beam_index(g, 1, 0), out = beam_index(g, 0, 1);
        const auto route = make_redirective_route(g, in, out);
        const CMatrix s_l = realize_load(combined_redirective_load({route}, 16), g);
        for (int beam = 0; beam < 16; ++beam) {
            const auto d = beam_direction(g, beam);
            if (!d || beam == out || d->theta >= oracle::pi / 2 - 1e-9) continue;
            INFO("beam " << beam);
            CHECK(std::abs(path_amplitude(array, s_l, route.incident, *d, ScatterModel::Naive)) < 1e-12);
        }
    }
}
