#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rislab/errors.hpp"
#include "rislab/quadrature.hpp"
#include "rislab/special_functions.hpp"

using namespace rislab;

TEST_SUITE("special_functions") {
    TEST_CASE("bessel_j1 matches Bessel's integral across both branches") {
        for (double x = 0.0; x <= 60.0; x += 0.173) {
            INFO("x = " << x);
            CHECK(std::abs(bessel_j1(x) - oracle::bessel_j1(x)) < 1e-12);
        }
    }

    TEST_CASE("bessel_j1 frozen high-precision values") {
        struct Ref {
            double x, j1;
        };
        // 20-digit reference values.
        const Ref refs[] = {{0.5, 0.24226845767487389}, {3.0, 0.33905895852593646},
                            {7.5, 0.13524842757970551}, {11.9, -0.22898324966192406},
                            {12.1, -0.21574897337692481}, {20.0, 0.066833124175850046},
                            {45.3, 0.061013978203840650}, {100.0, -0.077145352014112158}};
        for (const auto& r : refs) {
            INFO("x = " << r.x);
            CHECK(std::abs(bessel_j1(r.x) - r.j1) < 1e-12);
        }
        CHECK(std::abs(0.5 * bessel_j1(oracle::pi) - 0.14230767158987638) < 1e-14);
    }

    TEST_CASE("bessel_j1 is odd and vanishes at zero") {
        CHECK(bessel_j1(0.0) == 0.0);
        for (double x : {0.3, 5.0, 12.5, 33.0}) CHECK(bessel_j1(-x) == -bessel_j1(x));
    }

    TEST_CASE("bessel_j1 is continuous at the series/asymptotic switch") {
        const double below = bessel_j1(std::nextafter(12.0, 0.0));
        const double at = bessel_j1(12.0);
        CHECK(std::abs(below - at) < 2e-12);
    }
}

TEST_SUITE("quadrature") {
    TEST_CASE("Gauss-Legendre is exact to degree 2n-1") {
        for (int n : {1, 2, 5, 16, 64}) {
            const auto rule = gauss_legendre(n);
            REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
            for (int degree = 0; degree <= 2 * n - 1; ++degree) {
                double sum = 0.0;
                for (int i = 0; i < n; ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], degree);
                const double exact = degree % 2 ? 0.0 : 2.0 / (degree + 1);
                INFO("n = " << n << ", degree = " << degree);
                CHECK(std::abs(sum - exact) < 1e-13);
            }
        }
    }

    TEST_CASE("Gauss-Legendre nodes ascend inside (-1, 1) and weights are positive") {
        const auto rule = gauss_legendre(33);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            CHECK(rule.weights[i] > 0.0);
            CHECK(std::abs(rule.nodes[i]) < 1.0);
            if (i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
        }
        CHECK_THROWS_AS(gauss_legendre(0), DomainError);
    }

    TEST_CASE("hemisphere grid integrates the solid angle and cos(theta)") {
        const auto grid = AngularGrid::hemisphere();
        CHECK(grid.size() == 64u * 128u);
        CHECK(grid.total_weight() == doctest::Approx(2.0 * oracle::pi).epsilon(1e-14));
        double cos_moment = 0.0, cos2_sin2phi = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto d = grid.node(i);
            CHECK(d.theta >= 0.0);
            CHECK(d.theta <= oracle::pi / 2);
            cos_moment += grid.weight(i) * std::cos(d.theta);
            cos2_sin2phi += grid.weight(i) * std::pow(std::cos(d.theta) * std::sin(d.phi), 2);
        }
        CHECK(cos_moment == doctest::Approx(oracle::pi).epsilon(1e-13));
        // int_0^2pi sin^2(phi) dphi * int_0^1 c^2 dc
        CHECK(cos2_sin2phi == doctest::Approx(oracle::pi / 3).epsilon(1e-13));
    }

    TEST_CASE("from_nodes validates its input") {
        CHECK_THROWS_AS(AngularGrid::from_nodes({{0.1, 0.0}}, {1.0, 2.0}), ConfigurationError);
        CHECK_THROWS_AS(AngularGrid::from_nodes({{0.1, 0.0}}, {-1.0}), ConfigurationError);
        const auto g = AngularGrid::from_nodes({{0.1, 0.2}, {0.3, 0.4}}, {0.5, 1.5});
        CHECK(g.total_weight() == 2.0);
    }
}
