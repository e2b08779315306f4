#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "schw/connection.hpp"
#include "schw/density.hpp"
#include "schw/diffeo.hpp"

namespace schw {

/// A scenario file: named maps, an optional connection, an optional
/// second-order operator, and evaluation points, all given as expressions
/// or structured forms in JSON.
struct Scenario {
    int n = 0;
    std::optional<double> lambda;
    std::map<std::string, Diffeo> maps;
    Connection connection;             // projective view (flat when absent)
    std::optional<Connection> connection2;  // the "tilde" field for tdiff
    std::shared_ptr<ExprOperatorField> op;
    ScalarField potential;             // the operator's a0, used by sturm-liouville
    std::vector<std::vector<double>> points;
    std::uint64_t seed = 0;
    double tol = 1e-9;

    static Scenario from_json(const nlohmann::json& j);
    static Scenario load(const std::string& path);

    const Diffeo& map(const std::string& name) const;
};

/// Evaluate one object of the scenario at a point and render it as JSON
/// with 1-based index labels, omitting exact zeros.
/// `what` is one of: ell, schwarzian, tdiff, classical, symbol, act-direct,
/// act-explicit, sturm-liouville.
nlohmann::json eval_command(const Scenario& sc, const std::string& what, const std::string& map_name,
                            std::span<const double> at);

/// Structured rendering of an error for the CLI.
nlohmann::json error_json(const std::exception& e);

nlohmann::json to_json(const struct CheckReport& r);

}  // namespace schw
