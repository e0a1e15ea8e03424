#ifndef RISLAB_ROUTING_HPP
#define RISLAB_ROUTING_HPP

#include <vector>

#include "rislab/array_model.hpp"
#include "rislab/scattering.hpp"
#include "rislab/types.hpp"

namespace rislab {

/// One route through a switched (redirective) RIS: beam-port connections plus
/// the directions the route serves.
struct RedirectiveRoute {
    std::vector<LoadConfig::Connection> connections;
    Direction incident;
    Direction outgoing;

    /// Ports touched by the connections, ascending.
    std::vector<int> support() const;
};

/// One route through a phased (reflective) RIS: the unit-modulus diagonal of S_k.
struct ReflectiveRoute {
    CVector diagonal;
    Direction incident;
    Direction outgoing;
};

/// Route connecting the DFT beam ports of two visible beam directions.
RedirectiveRoute make_redirective_route(const ArrayGeometry& geom, int incident_beam,
                                        int outgoing_beam);

/// Conjugate-phase profile that maps `incident` coherently onto `outgoing`.
ReflectiveRoute make_reflective_route(const ArrayGeometry& geom, Direction incident,
                                      Direction outgoing);

/// Beam-domain switch matrix S' of a single route.
RMatrix route_permutation(const RedirectiveRoute& route, int m);

/// S_L' = sum_k S_k'. Routes must touch pairwise disjoint port sets; otherwise
/// ConfigurationError names the colliding ports.
RMatrix combine_redirective(const std::vector<RedirectiveRoute>& routes, int m);

/// The switched load realizing the combined routes (unused ports absorbed).
LoadConfig combined_redirective_load(const std::vector<RedirectiveRoute>& routes, int m);

/// sum_k || rows_{supp k} (S_L' - S_k') ||_F^2, evaluated in the beam domain
/// (the DFT is unitary, so this equals the element-domain objective).
double redirective_objective(const RMatrix& combined, const std::vector<RedirectiveRoute>& routes);

/// Closest diagonal unitary to all routes: the phase of sum_k S_k, entrywise.
/// Entries whose phasor sum vanishes get phase 0.
CVector combine_reflective(const std::vector<CVector>& diagonals);
CVector combine_reflective(const std::vector<ReflectiveRoute>& routes);

/// |s(out)^T T s(in)|^2 under the chosen model.
double route_power(const CoupledArray& array, const CMatrix& s_l, Direction incident,
                   Direction outgoing, ScatterModel model = ScatterModel::Exact);

/// route_power of the combined load relative to the same route served alone.
double route_gain(const CoupledArray& array, const CMatrix& s_l, const CMatrix& single_route_load,
                  Direction incident, Direction outgoing, ScatterModel model = ScatterModel::Exact);

}  // namespace rislab

#endif  // RISLAB_ROUTING_HPP
