#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rislab/array_model.hpp"
#include "rislab/errors.hpp"
#include "rislab/scattering.hpp"

using namespace rislab;

namespace {

CMatrix random_complex(int m, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    CMatrix a(m, m);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = cdouble(n(rng), n(rng));
    return a;
}

CMatrix random_unitary(int m, std::mt19937_64& rng) {
    Eigen::HouseholderQR<CMatrix> qr(random_complex(m, rng));
    return qr.householderQ() * CMatrix::Identity(m, m);
}

std::vector<double> random_phases(int m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-oracle::pi, oracle::pi);
    std::vector<double> p(m);
    for (auto& v : p) v = u(rng);
    return p;
}

}  // namespace

TEST_SUITE("scattering") {
    TEST_CASE("phased and zero loads") {
        const CMatrix id = realize_load(LoadConfig::phased(std::vector<double>(4, 0.0)), 4);
        CHECK((id - CMatrix::Identity(4, 4)).norm() == 0.0);
        CHECK(realize_load(LoadConfig::zero(), 5).norm() == 0.0);
        CHECK_THROWS_AS(realize_load(LoadConfig::phased({0.0, 1.0}), 3), ConfigurationError);
    }

    TEST_CASE("switched DFT load: 2x2 hand product") {
        const CMatrix s = realize_load(LoadConfig::switched_dft({{0, 1}}), 2);
        CHECK(std::abs(s(0, 0) - 1.0) < 1e-15);
        CHECK(std::abs(s(1, 1) + 1.0) < 1e-15);
        CHECK(std::abs(s(0, 1)) < 1e-15);
        CHECK(std::abs(s(1, 0)) < 1e-15);
    }

    TEST_CASE("switched DFT load: absorbed ports and rank") {
        CHECK(realize_load(LoadConfig::switched_dft({}, {0, 1, 2, 3}), 4).norm() < 1e-15);
        const ArrayGeometry g(4, 0.5);
        const CMatrix s = realize_load(LoadConfig::switched_dft({{1, 5}, {2, 9}, {3, 3}}), g);
        Eigen::JacobiSVD<CMatrix> svd(s);
        const auto sv = svd.singularValues();
        int rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > 1e-9;
        CHECK(rank == 5);  // two pairs and one self-connection
        CHECK((s - s.transpose()).norm() < 1e-12);
        CHECK(sv(0) == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("switched DFT load: invalid connections are rejected with the ports named") {
        try {
            beam_permutation(LoadConfig::switched_dft({{0, 1}, {1, 2}}), 4);
            FAIL("overlap accepted");
        } catch (const ConfigurationError& e) {
            CHECK(std::string(e.what()).find(" 1") != std::string::npos);
        }
        CHECK_THROWS_AS(beam_permutation(LoadConfig::switched_dft({{0, 4}}), 4), ConfigurationError);
        CHECK_THROWS_AS(beam_permutation(LoadConfig::switched_dft({{0, 1}}, {1}), 4), ConfigurationError);
        CHECK_THROWS_AS(LoadConfig::active(LoadConfig::zero(), 0.0), ConfigurationError);
    }

    TEST_CASE("exact transfer equals the direct inverse (S_L^-1 - S_aa)^-1") {
        std::mt19937_64 rng(5);
        for (int t = 0; t < 10; ++t) {
            const CMatrix s_aa = 0.3 * random_complex(4, rng) / 4.0;
            const CMatrix s_l = random_unitary(4, rng);
            const CMatrix direct = (s_l.inverse() - s_aa).inverse();
            CHECK((exact_transfer(s_aa, s_l) - direct).norm() <= 1e-10);
        }
    }

    TEST_CASE("exact transfer limits") {
        std::mt19937_64 rng(6);
        const CMatrix s_aa = 0.2 * random_unitary(3, rng);
        CHECK(exact_transfer(s_aa, CMatrix::Zero(3, 3)).norm() == 0.0);
        const CMatrix s_l = random_unitary(3, rng);
        CHECK((exact_transfer(CMatrix::Zero(3, 3), s_l) - s_l).norm() == 0.0);
        // T - S_L = S_L S_aa S_L eps + O(eps^2)
        const CMatrix first_order = s_l * s_aa * s_l;
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            const CMatrix diff = exact_transfer(eps * s_aa, s_l) - s_l;
            CHECK((diff / eps - first_order).norm() <= 2.0 * eps * first_order.norm());
        }
    }

    TEST_CASE("single element: closed-form reflection with the self-coupling loop") {
        const CoupledArray one(ArrayGeometry(1, 0.5));
        const double s = std::sqrt(1 - oracle::pi / 4);
        CHECK(std::abs(one.s_aa()(0, 0) - s) < 1e-15);
        for (double phase : {0.0, 1.0, oracle::pi}) {
            const cdouble g = std::polar(1.0, phase);
            CMatrix s_l(1, 1);
            s_l(0, 0) = g;
            const cdouble t = port_transfer(one, s_l, ScatterModel::Exact)(0, 0);
            CHECK(std::abs(t - g / (1.0 - g * s)) < 1e-14);
        }
    }

    TEST_CASE("instability is detected") {
        const CoupledArray array(ArrayGeometry(4, 0.5));
        const CMatrix amplified =
            realize_load(LoadConfig::active(LoadConfig::phased(std::vector<double>(16, 0.0)), 10.0),
                         array.geometry());
        CHECK_THROWS_AS(port_transfer(array, amplified, ScatterModel::Exact), InstabilityError);
        CHECK_THROWS_AS(noise_density(array, amplified, 0.0, 0.0, 1.0, 1.0), InstabilityError);
        CHECK(stability_margin(array.s_aa(), amplified) < 0.0);
        // The naive model has no loop to destabilize.
        CHECK_NOTHROW(port_transfer(array, amplified, ScatterModel::Naive));
    }

    TEST_CASE("stability margin") {
        std::mt19937_64 rng(8);
        CHECK(stability_margin(random_unitary(3, rng), CMatrix::Zero(3, 3)) == doctest::Approx(1.0));
        CMatrix s_aa = CMatrix::Zero(3, 3);
        s_aa(0, 0) = 0.2;
        s_aa(1, 1) = -0.5;
        s_aa(2, 2) = 0.1;
        CHECK(stability_margin(s_aa, 1.5 * CMatrix::Identity(3, 3)) == doctest::Approx(1 - 0.75).epsilon(1e-9));

        const CoupledArray array(ArrayGeometry(4, 0.5));
        const CMatrix s_l = realize_load(LoadConfig::phased(random_phases(16, rng)), array.geometry());
        const double margin = stability_margin(array.s_aa(), s_l);
        CHECK(margin >= 0.0);
        // Invariant under unitary changes of the load basis: ||U S_L S_aa||_2 = ||S_L S_aa||_2.
        const CMatrix u = random_unitary(16, rng);
        CHECK(stability_margin(array.s_aa(), u * s_l) == doctest::Approx(margin).epsilon(1e-8));
        Eigen::JacobiSVD<CMatrix> svd(s_l * array.s_aa());
        CHECK(1.0 - svd.singularValues()(0) == doctest::Approx(margin).epsilon(1e-8));
    }

    TEST_CASE("spectral norm bound is an upper bound") {
        std::mt19937_64 rng(9);
        for (int t = 0; t < 5; ++t) {
            const CMatrix a = random_complex(6, rng);
            Eigen::JacobiSVD<CMatrix> svd(a);
            CHECK(spectral_norm_bound(a) >= svd.singularValues()(0));
            CHECK(spectral_norm_bound(a) <= svd.singularValues()(0) * (1 + 1e-9));
        }
        CHECK(spectral_norm_bound(CMatrix::Identity(4, 4)) == 1.0);
    }

    TEST_CASE("scatter: zero input, naive identity load, and power scaling") {
        const CoupledArray array(ArrayGeometry(3, 0.5));
        const auto grid = AngularGrid::hemisphere(16, 32);
        const CMatrix id = CMatrix::Identity(9, 9);
        const auto empty = scatter(array, id, {}, grid, ScatterModel::Exact);
        CHECK(scattered_power(empty) == 0.0);

        const PlaneWaveSet broadside = {{{0.0, 0.0}, {2.0, 0.0}, 1.0}};
        const auto spectrum = scatter(array, id, broadside, grid, ScatterModel::Naive);
        const CVector x = array.pattern({0.0, 0.0}) * 2.0;
        for (std::size_t i = 0; i < grid.size(); i += 37) {
            const cdouble ref = array.pattern(grid.node(i)).transpose() * x;
            CHECK(std::abs(spectrum.values[i] - ref) < 1e-12);
        }
        PlaneWaveSet doubled = broadside;
        doubled[0].amplitude *= 3.0;
        CHECK(scattered_power(scatter(array, id, doubled, grid, ScatterModel::Naive)) ==
              doctest::Approx(9.0 * scattered_power(spectrum)).epsilon(1e-12));

        FarFieldSpectrum unit{grid, std::vector<cdouble>(grid.size(), 1.0)};
        CHECK(scattered_power(unit) == doctest::Approx(2 * oracle::pi).epsilon(1e-13));
    }

    TEST_CASE("scattered power matches the coupling quadratic form") {
        std::mt19937_64 rng(10);
        const CoupledArray array(ArrayGeometry(4, 0.5));
        const auto grid = AngularGrid::hemisphere();
        const CMatrix s_l = realize_load(LoadConfig::phased(random_phases(16, rng)), array.geometry());
        const PlaneWaveSet waves = {{{0.3, 0.5}, {1.0, 0.0}, 1.0}, {{0.8, -2.0}, {0.0, 0.5}, 1.0}};
        for (auto model : {ScatterModel::Exact, ScatterModel::Naive}) {
            const CVector y = port_transfer(array, s_l, model) * received_vector(array, waves);
            const double form = (y.adjoint() * array.coupling().cast<cdouble>() * y).value().real();
            CHECK(scattered_power(scatter(array, s_l, waves, grid, model)) ==
                  doctest::Approx(form).epsilon(1e-9));
        }
        CHECK(impinging_power(waves) == doctest::Approx(1.25));
    }

    TEST_CASE("re-radiation kernel, noise and interference") {
        const CoupledArray array(ArrayGeometry(4, 0.5));
        const ArrayGeometry& g = array.geometry();
        const CMatrix zero = CMatrix::Zero(16, 16);
        CHECK(noise_density(array, zero, 0.4, 0.2, 1.0, 2.0) == 0.0);
        CHECK(interference_density(array, zero, 0.4, 0.2, 1.0) == 0.0);

        std::mt19937_64 rng(12);
        const CMatrix s_l = realize_load(LoadConfig::phased(random_phases(16, rng)), g);
        const ReradiationKernel kernel(array, s_l);
        const CMatrix t = exact_transfer(array.s_aa(), s_l);
        const CMatrix b = array.coupling().cast<cdouble>();
        const CVector s = array.pattern({0.6, 1.1});
        const double k = (s.transpose() * t * b * t.adjoint() * s.conjugate()).value().real();
        CHECK(kernel(0.6, 1.1) == doctest::Approx(k).epsilon(1e-12));
        CHECK(interference_density(kernel, 0.6, 1.1, 3.0) == doctest::Approx(3 * k).epsilon(1e-12));
        CHECK(noise_density(kernel, g, 0.6, 1.1, 2.0, 1.5) ==
              doctest::Approx(3.0 * std::max(k - g.area() * std::cos(0.6), 0.0)).epsilon(1e-12));

        // Hemisphere integral of the kernel equals trace(K B).
        const auto grid = AngularGrid::hemisphere();
        double integral = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            integral += grid.weight(i) * kernel(grid.node(i).theta, grid.node(i).phi);
        }
        CHECK(kernel.hemisphere_integral() == doctest::Approx(integral).epsilon(1e-9));
    }

    TEST_CASE("noise density for an amplified switched route") {
        const CoupledArray array(ArrayGeometry(8, 0.5));
        const ArrayGeometry& g = array.geometry();
        const int in = beam_index(g, 1, 0), out = beam_index(g, 0, 2);
        const CMatrix s_l = realize_load(LoadConfig::active(LoadConfig::switched_dft({{in, out}}), 10.0), g);
        CHECK(spectral_radius(s_l * array.s_aa()) < 1.0);
        const Direction d = *beam_direction(g, out);
        CHECK(noise_density(array, s_l, d.theta, d.phi, 1.0, 1.0) > 0.0);
    }

    TEST_CASE("reflective loads re-radiate more interference than a single switched route") {
        std::mt19937_64 rng(13);
        const CoupledArray array(ArrayGeometry(4, 0.5));
        const ArrayGeometry& g = array.geometry();
        const double redirective =
            ReradiationKernel(array, realize_load(LoadConfig::switched_dft({{1, 4}}), g)).hemisphere_integral();
        for (int t = 0; t < 20; ++t) {
            const double reflective =
                ReradiationKernel(array, realize_load(LoadConfig::phased(random_phases(16, rng)), g))
                    .hemisphere_integral();
            CHECK(reflective > redirective);
        }
    }
}
