#include "rislab/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rislab/array_model.hpp"
#include "rislab/errors.hpp"
#include "rislab/estimation.hpp"
#include "rislab/parallel.hpp"
#include "rislab/quadrature.hpp"
#include "rislab/routing.hpp"

namespace rislab {
namespace {

using nlohmann::json;

constexpr std::pair<Workflow, std::string_view> kWorkflows[] = {
    {Workflow::Coupling, "coupling"}, {Workflow::Scatter, "scatter"},
    {Workflow::Bandwidth, "bandwidth"}, {Workflow::Overhead, "overhead"},
    {Workflow::Routing, "routing"},   {Workflow::Estimate, "estimate"},
};

// Raw text of the document, for line numbers in diagnostics.
struct Source {
    std::string name;
    std::string text;

    int line_of_byte(std::size_t byte) const {
        byte = std::min(byte, text.size());
        return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
    }

    // First line where `"key"` appears as an object key; 0 if not found.
    int line_of_key(const std::string& key) const {
        const std::string quoted = '"' + key + '"';
        for (std::size_t pos = text.find(quoted); pos != std::string::npos;
             pos = text.find(quoted, pos + 1)) {
            std::size_t after = pos + quoted.size();
            while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
            if (after < text.size() && text[after] == ':') return line_of_byte(pos);
        }
        return 0;
    }
};

class Node {
public:
    Node(const json& value, std::string path, std::string key, const Source& src)
        : value_(&value), path_(std::move(path)), key_(std::move(key)), src_(&src) {}

    [[noreturn]] void fail(const std::string& message) const { fail_at(key_, path_, message); }

    bool has(const std::string& key) const { return value_->is_object() && value_->contains(key); }

    Node at(const std::string& key) const {
        expect_object();
        if (!value_->contains(key)) fail("missing required key '" + key + "'");
        return Node((*value_)[key], child_path(key), key, *src_);
    }

    std::vector<Node> elements() const {
        if (!value_->is_array()) fail("expected a list");
        std::vector<Node> out;
        for (std::size_t i = 0; i < value_->size(); ++i) {
            out.emplace_back((*value_)[i], path_ + "[" + std::to_string(i) + "]", key_, *src_);
        }
        return out;
    }

    // A scalar stands for a one-element list.
    std::vector<Node> items() const {
        if (value_->is_array()) {
            auto out = elements();
            if (out.empty()) fail("list must not be empty");
            return out;
        }
        return {*this};
    }

    const json& raw() const { return *value_; }

    int as_int() const {
        if (!value_->is_number_integer()) fail("expected an integer");
        const auto v = value_->get<std::int64_t>();
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
            fail("integer out of range");
        }
        return static_cast<int>(v);
    }

    std::uint64_t as_u64() const {
        if (!value_->is_number_unsigned()) fail("expected a non-negative integer");
        return value_->get<std::uint64_t>();
    }

    // Numbers, plus the strings "inf" and "-inf".
    double as_real() const {
        if (value_->is_number()) return value_->get<double>();
        if (value_->is_string()) {
            const auto s = value_->get<std::string>();
            if (s == "inf") return std::numeric_limits<double>::infinity();
            if (s == "-inf") return -std::numeric_limits<double>::infinity();
        }
        fail("expected a number");
    }

    double as_finite() const {
        const double v = as_real();
        if (!std::isfinite(v)) fail("expected a finite number");
        return v;
    }

    double as_positive() const {
        const double v = as_finite();
        if (!(v > 0.0)) fail("expected a positive number");
        return v;
    }

    std::string as_string() const {
        if (!value_->is_string()) fail("expected a string");
        return value_->get<std::string>();
    }

    std::vector<double> finite_list() const {
        std::vector<double> out;
        for (const auto& n : items()) out.push_back(n.as_finite());
        return out;
    }

    std::vector<int> int_list() const {
        std::vector<int> out;
        for (const auto& n : items()) out.push_back(n.as_int());
        return out;
    }

    // Rejects keys outside `allowed`.
    void allow(std::initializer_list<std::string_view> allowed) const {
        expect_object();
        for (const auto& [key, _] : value_->items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                std::string expected;
                for (auto a : allowed) expected += (expected.empty() ? "" : ", ") + std::string(a);
                fail_at(key, child_path(key), "unknown key (allowed: " + expected + ")");
            }
        }
    }

private:
    void expect_object() const {
        if (!value_->is_object()) fail("expected an object");
    }

    std::string child_path(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    [[noreturn]] void fail_at(const std::string& key, const std::string& path,
                              const std::string& message) const {
        std::ostringstream msg;
        msg << src_->name << ':';
        if (const int line = key.empty() ? 0 : src_->line_of_key(key); line > 0) msg << line << ':';
        msg << ' ' << (path.empty() ? "<root>" : path) << ": " << message;
        throw ConfigurationError(msg.str());
    }

    const json* value_;
    std::string path_;
    std::string key_;
    const Source* src_;
};

Direction parse_direction(const Node& n) {
    n.allow({"theta", "phi"});
    Direction d{n.at("theta").as_finite(), n.has("phi") ? n.at("phi").as_finite() : 0.0};
    if (d.theta < 0.0 || d.theta > kPi / 2) n.at("theta").fail("theta must lie in [0, pi/2]");
    return d;
}

std::vector<ScatterModel> parse_models(const Node& root) {
    if (!root.has("models")) return {ScatterModel::Exact, ScatterModel::Naive};
    std::vector<ScatterModel> out;
    for (const auto& n : root.at("models").items()) {
        const auto name = n.as_string();
        if (name == "exact") {
            out.push_back(ScatterModel::Exact);
        } else if (name == "naive") {
            out.push_back(ScatterModel::Naive);
        } else {
            n.fail("model must be \"exact\" or \"naive\"");
        }
    }
    return out;
}

LoadConfig parse_load(const Node& n, int m) {
    const auto kind = n.at("kind").as_string();
    if (kind == "zero") {
        n.allow({"kind"});
        return LoadConfig::zero();
    }
    if (kind == "phased") {
        n.allow({"kind", "phases"});
        auto phases = n.at("phases").finite_list();
        if (phases.size() == 1) phases.assign(m, phases.front());
        if (static_cast<int>(phases.size()) != m) {
            n.at("phases").fail("expected 1 or " + std::to_string(m) + " phases");
        }
        return LoadConfig::phased(std::move(phases));
    }
    if (kind == "switched_dft") {
        n.allow({"kind", "connections", "absorbed"});
        std::vector<LoadConfig::Connection> connections;
        for (const auto& c : n.at("connections").elements()) {
            const auto pair = c.elements();
            if (pair.size() != 2) c.fail("connection must be a pair [i, j]");
            connections.emplace_back(pair[0].as_int(), pair[1].as_int());
        }
        std::vector<int> absorbed;
        if (n.has("absorbed")) {
            for (const auto& a : n.at("absorbed").elements()) absorbed.push_back(a.as_int());
        }
        auto cfg = LoadConfig::switched_dft(std::move(connections), std::move(absorbed));
        try {
            beam_permutation(cfg, m);
        } catch (const ConfigurationError& e) {
            n.at("connections").fail(e.what());
        }
        return cfg;
    }
    if (kind == "active") {
        n.allow({"kind", "gain", "inner"});
        return LoadConfig::active(parse_load(n.at("inner"), m), n.at("gain").as_positive());
    }
    n.at("kind").fail("unknown load kind '" + kind + "'");
}

void check_geometry(const Node& root, int n_side, double spacing) {
    if (n_side < 1) root.at("n_side").fail("n_side must be positive");
    if (!(spacing > 0.0)) root.at("spacing").fail("spacing must be positive");
}

CouplingScenario parse_coupling(const Node& root) {
    CouplingScenario s;
    s.n_side = root.at("n_side").int_list();
    s.spacing = root.at("spacing").finite_list();
    for (int n : s.n_side) check_geometry(root, n, 1.0);
    for (double a : s.spacing) check_geometry(root, 1, a);
    if (root.has("method")) {
        const auto method = root.at("method").as_string();
        if (method == "quadrature") {
            s.quadrature = true;
        } else if (method != "closed_form") {
            root.at("method").fail("method must be \"closed_form\" or \"quadrature\"");
        }
    }
    if (root.has("theta_nodes")) s.theta_nodes = root.at("theta_nodes").as_int();
    if (root.has("phi_nodes")) s.phi_nodes = root.at("phi_nodes").as_int();
    if (s.theta_nodes < 1 || s.phi_nodes < 1) root.fail("quadrature node counts must be positive");
    return s;
}

ScatterScenario parse_scatter(const Node& root) {
    ScatterScenario s;
    s.n_side = root.at("n_side").as_int();
    s.spacing = root.at("spacing").as_finite();
    check_geometry(root, s.n_side, s.spacing);
    s.load = parse_load(root.at("load"), s.n_side * s.n_side);
    const Node incident = root.at("incident");
    incident.allow({"theta", "phi", "amplitude"});
    s.incident = Direction{incident.at("theta").as_finite(),
                           incident.has("phi") ? incident.at("phi").as_finite() : 0.0};
    if (s.incident.theta < 0.0 || s.incident.theta > kPi / 2) {
        incident.at("theta").fail("theta must lie in [0, pi/2]");
    }
    if (incident.has("amplitude")) s.amplitude = incident.at("amplitude").as_finite();
    for (const auto& d : root.at("observe").elements()) s.observe.push_back(parse_direction(d));
    s.models = parse_models(root);
    if (root.has("noise")) {
        const Node noise = root.at("noise");
        noise.allow({"n0", "noise_figure", "interference"});
        if (noise.has("n0")) s.n0 = noise.at("n0").as_finite();
        if (noise.has("noise_figure")) s.noise_figure = noise.at("noise_figure").as_finite();
        if (noise.has("interference")) s.interference = noise.at("interference").as_finite();
    }
    return s;
}

BandwidthScenario parse_bandwidth(const Node& root) {
    BandwidthScenario s;
    auto positive_list = [&](const char* key, bool allow_inf) {
        std::vector<double> out;
        for (const auto& n : root.at(key).items()) {
            const double v = allow_inf ? n.as_real() : n.as_finite();
            if (!(v > 0.0)) n.fail("expected a positive value");
            out.push_back(v);
        }
        return out;
    };
    s.d_tx = positive_list("d_tx", true);
    s.d_rx = positive_list("d_rx", true);
    s.side_length = positive_list("side_length", false);
    auto angle_list = [&](const char* key) {
        std::vector<double> out;
        for (const auto& n : root.at(key).items()) {
            const double v = n.as_finite();
            if (std::abs(v) > kPi / 2) n.fail("angle must lie in [-pi/2, pi/2]");
            out.push_back(v);
        }
        return out;
    };
    s.theta_incident = angle_list("theta_incident");
    s.theta_reflected = angle_list("theta_reflected");
    return s;
}

OverheadScenario parse_overhead(const Node& root) {
    OverheadScenario s;
    const Node p = root.at("params");
    p.allow({"nodes", "channel_gain", "transmit_power", "bandwidth", "noise_density",
             "fronthaul_gain", "control_bits", "control_efficiency", "slot_symbols"});
    auto field = [&](const char* key, double& target) {
        if (p.has(key)) target = p.at(key).as_positive();
    };
    field("nodes", s.params.nodes);
    field("channel_gain", s.params.channel_gain);
    field("transmit_power", s.params.transmit_power);
    field("bandwidth", s.params.bandwidth);
    field("noise_density", s.params.noise_density);
    field("fronthaul_gain", s.params.fronthaul_gain);
    field("control_bits", s.params.control_bits);
    field("control_efficiency", s.params.control_efficiency);
    field("slot_symbols", s.params.slot_symbols);
    for (const auto& n : root.at("access_gain").items()) {
        const double v = n.as_finite();
        if (v < 1.0) n.fail("access gain must be >= 1");
        s.access_gain.push_back(v);
    }
    return s;
}

RoutingScenario parse_routing(const Node& root) {
    RoutingScenario s;
    s.n_side = root.at("n_side").as_int();
    s.spacing = root.at("spacing").as_finite();
    check_geometry(root, s.n_side, s.spacing);
    const auto kind = root.at("kind").as_string();
    if (kind != "redirective" && kind != "reflective") {
        root.at("kind").fail("kind must be \"redirective\" or \"reflective\"");
    }
    s.redirective = kind == "redirective";
    const ArrayGeometry geom(s.n_side, s.spacing);
    for (const auto& r : root.at("routes").elements()) {
        RoutingScenario::Route route;
        if (s.redirective) {
            r.allow({"incident_beam", "outgoing_beam"});
            route.incident_beam = r.at("incident_beam").as_int();
            route.outgoing_beam = r.at("outgoing_beam").as_int();
            for (int beam : {route.incident_beam, route.outgoing_beam}) {
                if (beam < 0 || beam >= geom.element_count() || !beam_direction(geom, beam)) {
                    r.fail("beam " + std::to_string(beam) + " is not a visible DFT beam");
                }
            }
        } else {
            r.allow({"incident", "outgoing"});
            route.incident = parse_direction(r.at("incident"));
            route.outgoing = parse_direction(r.at("outgoing"));
        }
        s.routes.push_back(route);
    }
    if (s.routes.empty()) root.at("routes").fail("at least one route is required");
    if (s.redirective) {
        std::vector<RedirectiveRoute> routes;
        for (const auto& r : s.routes) {
            routes.push_back(make_redirective_route(geom, r.incident_beam, r.outgoing_beam));
        }
        try {
            combine_redirective(routes, geom.element_count());
        } catch (const ConfigurationError& e) {
            root.at("routes").fail(e.what());
        }
    }
    s.models = parse_models(root);
    return s;
}

EstimateScenario parse_estimate(const Node& root) {
    EstimateScenario s;
    s.ports = root.at("ports").int_list();
    for (int m : s.ports) {
        if (m < 1 || (m & (m - 1)) != 0) root.at("ports").fail("ports must be powers of two");
    }
    s.sparsity = root.at("sparsity").as_int();
    for (int m : s.ports) {
        if (s.sparsity < 0 || s.sparsity > m) root.at("sparsity").fail("sparsity must lie in [0, M]");
    }
    for (const auto& n : root.at("snr_db").items()) {
        const double v = n.as_real();
        if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) n.fail("invalid SNR");
        s.snr_db.push_back(v);
    }
    s.trials = root.at("trials").as_int();
    if (s.trials < 1) root.at("trials").fail("trials must be positive");
    return s;
}

const char* model_name(ScatterModel m) { return m == ScatterModel::Exact ? "exact" : "naive"; }

// Runs one task per sweep point and concatenates their rows in sweep order.
template <typename Fn>
ResultTable sweep(std::vector<std::string> columns, std::size_t points, int jobs, Fn&& task) {
    std::vector<std::vector<std::vector<Cell>>> parts(points);
    parallel_for(points, jobs, [&](std::size_t i) { parts[i] = task(i); });
    ResultTable table(std::move(columns));
    for (auto& part : parts) {
        for (auto& row : part) table.add_row(std::move(row));
    }
    return table;
}

ResultTable run(const CouplingScenario& s, int jobs) {
    const std::size_t points = s.n_side.size() * s.spacing.size();
    return sweep({"n_side", "spacing", "index", "eigenvalue"}, points, jobs, [&](std::size_t i) {
        const int n = s.n_side[i / s.spacing.size()];
        const double a = s.spacing[i % s.spacing.size()];
        const ArrayGeometry geom(n, a);
        RVector eig;
        if (s.quadrature) {
            const CMatrix b = coupling_matrix_by_quadrature(
                geom, AngularGrid::hemisphere(s.theta_nodes, s.phi_nodes));
            Eigen::SelfAdjointEigenSolver<CMatrix> solver(b, Eigen::EigenvaluesOnly);
            eig = solver.eigenvalues();
        } else {
            Eigen::SelfAdjointEigenSolver<RMatrix> solver(coupling_matrix(geom), Eigen::EigenvaluesOnly);
            eig = solver.eigenvalues();
        }
        std::vector<std::vector<Cell>> rows;
        for (Eigen::Index k = 0; k < eig.size(); ++k) {
            rows.push_back({std::int64_t{n}, a, static_cast<std::int64_t>(k), eig(k)});
        }
        return rows;
    });
}

ResultTable run(const ScatterScenario& s, int jobs) {
    const CoupledArray array(ArrayGeometry(s.n_side, s.spacing));
    const CMatrix s_l = realize_load(s.load, array.geometry());
    const CVector x = array.pattern(s.incident) * s.amplitude;
    std::vector<CMatrix> transfers;
    for (auto model : s.models) transfers.push_back(port_transfer(array, s_l, model));
    const ReradiationKernel kernel(array, s_l);
    const std::size_t points = s.models.size() * s.observe.size();
    return sweep({"model", "theta", "phi", "power", "noise_density", "interference_density"}, points,
                 jobs, [&](std::size_t i) {
                     const std::size_t k = i / s.observe.size();
                     const Direction d = s.observe[i % s.observe.size()];
                     const cdouble b = array.pattern(d).transpose() * transfers[k] * x;
                     std::vector<Cell> row{std::string(model_name(s.models[k])), d.theta, d.phi,
                                           std::norm(b), std::monostate{}, std::monostate{}};
                     if (s.models[k] == ScatterModel::Exact) {
                         row[4] = noise_density(kernel, array.geometry(), d.theta, d.phi, s.n0,
                                                s.noise_figure);
                         row[5] = interference_density(kernel, d.theta, d.phi, s.interference);
                     }
                     return std::vector<std::vector<Cell>>{std::move(row)};
                 });
}

ResultTable run(const BandwidthScenario& s, int jobs) {
    const std::size_t n1 = s.d_tx.size(), n2 = s.d_rx.size(), n3 = s.theta_incident.size(),
                      n4 = s.theta_reflected.size(), n5 = s.side_length.size();
    return sweep({"d_tx", "d_rx", "theta_incident", "theta_reflected", "side_length",
                  "fresnel_size", "max_size", "bandwidth_limit", "bandwidth_limit_fresnel"},
                 n1 * n2 * n3 * n4 * n5, jobs, [&](std::size_t i) {
                     GeometryScenario g;
                     g.side_length = s.side_length[i % n5];
                     i /= n5;
                     g.theta_reflected = s.theta_reflected[i % n4];
                     i /= n4;
                     g.theta_incident = s.theta_incident[i % n3];
                     i /= n3;
                     g.d_rx = s.d_rx[i % n2];
                     g.d_tx = s.d_tx[i / n2];
                     const FresnelSize f = fresnel_size(g.d_tx, g.d_rx);
                     return std::vector<std::vector<Cell>>{
                         {g.d_tx, g.d_rx, g.theta_incident, g.theta_reflected, g.side_length,
                          f.required_size, f.max_size, fractional_bandwidth_limit(g, false),
                          fractional_bandwidth_limit(g, true)}};
                 });
}

ResultTable run(const OverheadScenario& s, int jobs) {
    return sweep({"access_gain", "rate_redirective", "redirective_saturated", "rate_reflective",
                  "reflective_saturated"},
                 s.access_gain.size(), jobs, [&](std::size_t i) {
                     OverheadParams p = s.params;
                     p.access_gain = s.access_gain[i];
                     const RateResult red = rate_redirective(p);
                     const RateResult ref = rate_reflective(p);
                     return std::vector<std::vector<Cell>>{
                         {p.access_gain, red.rate, std::int64_t{red.overhead_saturated}, ref.rate,
                          std::int64_t{ref.overhead_saturated}}};
                 });
}

ResultTable run(const RoutingScenario& s, int jobs) {
    const CoupledArray array(ArrayGeometry(s.n_side, s.spacing));
    const ArrayGeometry& geom = array.geometry();
    const int m = geom.element_count();

    std::vector<CMatrix> singles;
    std::vector<Direction> in, out;
    std::vector<double> objective;
    CMatrix combined;
    if (s.redirective) {
        std::vector<RedirectiveRoute> routes;
        for (const auto& r : s.routes) routes.push_back(make_redirective_route(geom, r.incident_beam, r.outgoing_beam));
        combined = realize_load(combined_redirective_load(routes, m), geom);
        const RMatrix beam_domain = combine_redirective(routes, m);
        for (const auto& r : routes) {
            singles.push_back(realize_load(LoadConfig::switched_dft(r.connections), geom));
            in.push_back(r.incident);
            out.push_back(r.outgoing);
            objective.push_back(redirective_objective(beam_domain, {r}));
        }
    } else {
        std::vector<ReflectiveRoute> routes;
        for (const auto& r : s.routes) routes.push_back(make_reflective_route(geom, r.incident, r.outgoing));
        const CVector diagonal = combine_reflective(routes);
        combined = diagonal.asDiagonal();
        for (const auto& r : routes) {
            singles.push_back(r.diagonal.asDiagonal());
            in.push_back(r.incident);
            out.push_back(r.outgoing);
            objective.push_back((diagonal - r.diagonal).squaredNorm());
        }
    }
    const std::size_t points = s.models.size() * s.routes.size();
    return sweep({"route", "model", "incident_theta", "incident_phi", "outgoing_theta",
                  "outgoing_phi", "objective", "single_power", "combined_power", "gain"},
                 points, jobs, [&](std::size_t i) {
                     const std::size_t k = i % s.routes.size();
                     const ScatterModel model = s.models[i / s.routes.size()];
                     const double single = route_power(array, singles[k], in[k], out[k], model);
                     const double both = route_power(array, combined, in[k], out[k], model);
                     const Cell gain = single > 0.0 ? Cell(both / single) : Cell(std::monostate{});
                     return std::vector<std::vector<Cell>>{
                         {static_cast<std::int64_t>(k), std::string(model_name(model)), in[k].theta,
                          in[k].phi, out[k].theta, out[k].phi, objective[k], single, both, gain}};
                 });
}

ResultTable run(const EstimateScenario& s, std::uint64_t seed, int jobs) {
    ResultTable table({"ports", "sparsity", "snr_db", "noise_sd", "mse_retro", "mse_cascaded", "gain"});
    for (int m : s.ports) {
        const auto report = compare_estimators(m, s.sparsity, s.snr_db, s.trials, seed, jobs);
        for (const auto& r : report.rows) {
            table.add_row({std::int64_t{m}, std::int64_t{s.sparsity}, r.snr_db, r.noise_sd,
                           r.mse_retro, r.mse_cascaded,
                           r.gain ? Cell(*r.gain) : Cell(std::monostate{})});
        }
    }
    return table;
}

}  // namespace

std::string_view workflow_name(Workflow w) {
    for (const auto& [id, name] : kWorkflows) {
        if (id == w) return name;
    }
    return "unknown";
}

std::optional<Workflow> parse_workflow(std::string_view name) {
    for (const auto& [id, n] : kWorkflows) {
        if (n == name) return id;
    }
    return std::nullopt;
}

ScenarioConfig parse_config(const std::string& text, const std::string& source,
                            std::optional<Workflow> expected) {
    const Source src{source, text};
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigurationError(source + ":" + std::to_string(src.line_of_byte(e.byte)) +
                                 ": malformed JSON: " + e.what());
    }
    const Node root(doc, "", "", src);
    if (!doc.is_object()) root.fail("top level must be an object");

    ScenarioConfig cfg;
    if (root.has("workflow")) {
        const auto name = root.at("workflow").as_string();
        const auto w = parse_workflow(name);
        if (!w) root.at("workflow").fail("unknown workflow '" + name + "'");
        if (expected && *expected != *w) {
            root.at("workflow").fail("config is for '" + name + "' but the '" +
                                     std::string(workflow_name(*expected)) + "' command was run");
        }
        cfg.workflow = *w;
    } else if (expected) {
        cfg.workflow = *expected;
        doc["workflow"] = std::string(workflow_name(*expected));
    } else {
        root.fail("missing required key 'workflow'");
    }
    cfg.stem = std::string(workflow_name(cfg.workflow));

    static const std::vector<std::string_view> common = {"workflow", "seed", "output"};
    std::vector<std::string_view> keys;
    switch (cfg.workflow) {
        case Workflow::Coupling: keys = {"n_side", "spacing", "method", "theta_nodes", "phi_nodes"}; break;
        case Workflow::Scatter: keys = {"n_side", "spacing", "load", "incident", "observe", "models", "noise"}; break;
        case Workflow::Bandwidth: keys = {"d_tx", "d_rx", "theta_incident", "theta_reflected", "side_length"}; break;
        case Workflow::Overhead: keys = {"params", "access_gain"}; break;
        case Workflow::Routing: keys = {"n_side", "spacing", "kind", "routes", "models"}; break;
        case Workflow::Estimate: keys = {"ports", "sparsity", "snr_db", "trials"}; break;
    }
    keys.insert(keys.end(), common.begin(), common.end());
    for (const auto& [key, _] : doc.items()) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            std::string allowed;
            for (auto k : keys) allowed += (allowed.empty() ? "" : ", ") + std::string(k);
            Node(doc[key], key, key, src).fail("unknown key (allowed: " + allowed + ")");
        }
    }

    if (root.has("seed")) cfg.seed = root.at("seed").as_u64();
    if (root.has("output")) {
        const Node out = root.at("output");
        out.allow({"directory", "stem", "format"});
        if (out.has("directory")) cfg.out_dir = out.at("directory").as_string();
        if (out.has("stem")) {
            cfg.stem = out.at("stem").as_string();
            if (cfg.stem.empty() || cfg.stem.find('/') != std::string::npos) {
                out.at("stem").fail("stem must be a plain file name");
            }
        }
        if (out.has("format")) {
            const auto f = out.at("format").as_string();
            if (f == "csv") {
                cfg.format = OutputFormat::Csv;
            } else if (f == "json") {
                cfg.format = OutputFormat::Json;
            } else {
                out.at("format").fail("format must be \"csv\" or \"json\"");
            }
        }
    }

    try {
        switch (cfg.workflow) {
            case Workflow::Coupling: cfg.spec = parse_coupling(root); break;
            case Workflow::Scatter: cfg.spec = parse_scatter(root); break;
            case Workflow::Bandwidth: cfg.spec = parse_bandwidth(root); break;
            case Workflow::Overhead: cfg.spec = parse_overhead(root); break;
            case Workflow::Routing: cfg.spec = parse_routing(root); break;
            case Workflow::Estimate: cfg.spec = parse_estimate(root); break;
        }
    } catch (const DomainError& e) {
        throw ConfigurationError(source + ": " + e.what());
    }
    cfg.document = std::move(doc);
    cfg.document["seed"] = cfg.seed;
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, std::optional<Workflow> expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.string(), expected);
}

void override_seed(ScenarioConfig& cfg, std::uint64_t seed) {
    cfg.seed = seed;
    cfg.document["seed"] = seed;
}

std::string config_hash(const ScenarioConfig& cfg) { return fnv1a_hex(cfg.document.dump()); }

ResultTable run_scenario(const ScenarioConfig& cfg, int jobs) {
    ResultTable table = std::visit(
        [&](const auto& spec) -> ResultTable {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, EstimateScenario>) {
                return run(spec, cfg.seed, jobs);
            } else {
                return run(spec, jobs);
            }
        },
        cfg.spec);
    table.metadata.workflow = std::string(workflow_name(cfg.workflow));
    table.metadata.seed = cfg.seed;
    table.metadata.config_hash = config_hash(cfg);
    return table;
}

}  // namespace rislab
