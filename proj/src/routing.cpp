#include "rislab/routing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "rislab/errors.hpp"

namespace rislab {

std::vector<int> RedirectiveRoute::support() const {
    std::vector<int> ports;
    for (const auto& [i, j] : connections) {
        ports.push_back(i);
        if (j != i) ports.push_back(j);
    }
    std::sort(ports.begin(), ports.end());
    ports.erase(std::unique(ports.begin(), ports.end()), ports.end());
    return ports;
}

RedirectiveRoute make_redirective_route(const ArrayGeometry& geom, int incident_beam,
                                        int outgoing_beam) {
    const auto in = beam_direction(geom, incident_beam);
    const auto out = beam_direction(geom, outgoing_beam);
    if (!in || !out) throw ConfigurationError("redirective route: beam outside the visible region");
    return {{{incident_beam, outgoing_beam}}, *in, *out};
}

ReflectiveRoute make_reflective_route(const ArrayGeometry& geom, Direction incident,
                                      Direction outgoing) {
    const CVector product =
        steering_vector(geom, incident).cwiseProduct(steering_vector(geom, outgoing));
    CVector diagonal(product.size());
    for (Eigen::Index i = 0; i < product.size(); ++i) {
        diagonal(i) = std::polar(1.0, -std::arg(product(i)));
    }
    return {diagonal, incident, outgoing};
}

RMatrix route_permutation(const RedirectiveRoute& route, int m) {
    return beam_permutation(LoadConfig::switched_dft(route.connections), m);
}

RMatrix combine_redirective(const std::vector<RedirectiveRoute>& routes, int m) {
    std::map<int, int> owner;
    std::vector<int> collisions;
    for (std::size_t k = 0; k < routes.size(); ++k) {
        for (int port : routes[k].support()) {
            const auto [it, inserted] = owner.emplace(port, static_cast<int>(k));
            if (!inserted) collisions.push_back(port);
        }
    }
    if (!collisions.empty()) {
        std::ostringstream msg;
        msg << "redirective routes overlap at port(s)";
        for (int p : collisions) msg << ' ' << p;
        throw ConfigurationError(msg.str());
    }
    RMatrix combined = RMatrix::Zero(m, m);
    for (const auto& route : routes) combined += route_permutation(route, m);
    return combined;
}

LoadConfig combined_redirective_load(const std::vector<RedirectiveRoute>& routes, int m) {
    combine_redirective(routes, m);  // validates disjointness
    std::vector<LoadConfig::Connection> all;
    for (const auto& route : routes) {
        all.insert(all.end(), route.connections.begin(), route.connections.end());
    }
    return LoadConfig::switched_dft(std::move(all));
}

double redirective_objective(const RMatrix& combined, const std::vector<RedirectiveRoute>& routes) {
    const int m = static_cast<int>(combined.rows());
    double total = 0.0;
    for (const auto& route : routes) {
        const RMatrix diff = combined - route_permutation(route, m);
        for (int port : route.support()) total += diff.row(port).squaredNorm();
    }
    return total;
}

CVector combine_reflective(const std::vector<CVector>& diagonals) {
    if (diagonals.empty()) throw ConfigurationError("combine_reflective: need at least one route");
    CVector sum = CVector::Zero(diagonals.front().size());
    for (const auto& d : diagonals) {
        if (d.size() != sum.size()) throw ConfigurationError("combine_reflective: size mismatch");
        sum += d;
    }
    const double eps = 1e-12 * static_cast<double>(diagonals.size());
    CVector out(sum.size());
    for (Eigen::Index i = 0; i < sum.size(); ++i) {
        out(i) = std::abs(sum(i)) <= eps ? cdouble(1.0, 0.0) : sum(i) / std::abs(sum(i));
    }
    return out;
}

CVector combine_reflective(const std::vector<ReflectiveRoute>& routes) {
    std::vector<CVector> diagonals;
    diagonals.reserve(routes.size());
    for (const auto& r : routes) diagonals.push_back(r.diagonal);
    return combine_reflective(diagonals);
}

double route_power(const CoupledArray& array, const CMatrix& s_l, Direction incident,
                   Direction outgoing, ScatterModel model) {
    return std::norm(path_amplitude(array, s_l, incident, outgoing, model));
}

double route_gain(const CoupledArray& array, const CMatrix& s_l, const CMatrix& single_route_load,
                  Direction incident, Direction outgoing, ScatterModel model) {
    const double reference = route_power(array, single_route_load, incident, outgoing, model);
    if (!(reference > 0.0)) throw NumericalError("route_gain: route carries no power on its own");
    return route_power(array, s_l, incident, outgoing, model) / reference;
}

}  // namespace rislab
