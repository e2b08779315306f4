#include "schw/scenario.hpp"

#include <fstream>

#include "schw/checks.hpp"
#include "schw/schwarzian.hpp"

namespace schw {

using nlohmann::json;

namespace {

Connection connection_from_json(int n, const json& j) {
    std::string kind = j.value("kind", "pi");
    if (kind == "flat") return Connection::flat(n);
    std::map<std::string, std::string> entries;
    if (j.contains("entries"))
        for (auto it = j.at("entries").begin(); it != j.at("entries").end(); ++it)
            entries[it.key()] = it.value().get<std::string>();
    if (kind == "gamma") return Connection::projective_from_christoffel(Connection::christoffel(n, entries));
    if (kind == "pi") return Connection::projective(n, entries);
    throw DataError("connection kind must be one of flat|gamma|pi, got \"" + kind + "\"");
}

std::vector<double> matrix_from_json(const json& j, int rows, int cols) {
    std::vector<double> m;
    m.reserve(rows * cols);
    if (!j.is_array() || static_cast<int>(j.size()) != rows) throw DataError("matrix must have " + std::to_string(rows) + " rows");
    for (const auto& row : j) {
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw DataError("matrix rows must have " + std::to_string(cols) + " entries");
        for (const auto& v : row) m.push_back(v.get<double>());
    }
    return m;
}

}  // namespace

Scenario Scenario::from_json(const json& j) {
    Scenario sc;
    sc.n = j.at("dimension").get<int>();
    if (sc.n < 1 || sc.n > kMaxJetDim) throw DataError("scenario dimension out of range");
    if (j.contains("lambda")) sc.lambda = j.at("lambda").get<double>();
    sc.seed = j.value("seed", 42ULL);
    sc.tol = j.value("tol", 1e-9);

    // Maps: primitives first, then named references until a fixed point.
    std::map<std::string, json> pending;
    if (j.contains("maps"))
        for (auto it = j.at("maps").begin(); it != j.at("maps").end(); ++it) pending[it.key()] = it.value();
    bool progress = true;
    while (!pending.empty() && progress) {
        progress = false;
        for (auto it = pending.begin(); it != pending.end();) {
            const json& d = it->second;
            std::string type = d.value("type", "expressions");
            bool done = false;
            if (type == "moebius") {
                sc.maps.emplace(it->first,
                                Diffeo::moebius(ProjectiveMatrix(sc.n, matrix_from_json(d.at("matrix"), sc.n + 1, sc.n + 1))));
                done = true;
            } else if (type == "affine") {
                std::vector<double> off(sc.n, 0.0);
                if (d.contains("offset")) off = d.at("offset").get<std::vector<double>>();
                sc.maps.emplace(it->first, Diffeo::affine(sc.n, matrix_from_json(d.at("matrix"), sc.n, sc.n), off));
                done = true;
            } else if (type == "expressions") {
                sc.maps.emplace(it->first,
                                Diffeo::from_expressions(sc.n, d.at("components").get<std::vector<std::string>>()));
                done = true;
            } else if (type == "identity") {
                sc.maps.emplace(it->first, Diffeo::identity(sc.n));
                done = true;
            } else if (type == "compose") {
                auto names = d.at("of").get<std::vector<std::string>>();
                if (names.empty()) throw DataError("compose needs at least one map name");
                bool ready = true;
                for (const auto& nm : names)
                    if (!sc.maps.count(nm)) ready = false;
                if (ready) {
                    Diffeo acc = sc.maps.at(names.back());
                    for (int i = static_cast<int>(names.size()) - 2; i >= 0; --i)
                        acc = Diffeo::compose(sc.maps.at(names[i]), acc);
                    sc.maps.emplace(it->first, acc);
                    done = true;
                }
            } else if (type == "inverse") {
                std::string of = d.at("of").get<std::string>();
                if (sc.maps.count(of)) {
                    sc.maps.emplace(it->first, sc.maps.at(of).inverse());
                    done = true;
                }
            } else {
                throw DataError("unknown map type \"" + type + "\"");
            }
            if (done) {
                it = pending.erase(it);
                progress = true;
            } else {
                ++it;
            }
        }
    }
    if (!pending.empty()) throw DataError("unresolved map reference \"" + pending.begin()->first + "\"");

    if (j.contains("connection"))
        sc.connection = connection_from_json(sc.n, j.at("connection"));
    else
        sc.connection = Connection::flat(sc.n);
    if (j.contains("connection2")) sc.connection2 = connection_from_json(sc.n, j.at("connection2"));

    if (j.contains("operator")) {
        const json& o = j.at("operator");
        std::map<std::string, std::string> a2, a1;
        if (o.contains("a2"))
            for (auto it = o.at("a2").begin(); it != o.at("a2").end(); ++it) a2[it.key()] = it.value().get<std::string>();
        if (o.contains("a1"))
            for (auto it = o.at("a1").begin(); it != o.at("a1").end(); ++it) a1[it.key()] = it.value().get<std::string>();
        std::string a0 = o.value("a0", "");
        sc.op = std::make_shared<ExprOperatorField>(sc.n, a2, a1, a0);
        if (!a0.empty()) sc.potential = ScalarField::parse(a0, sc.n);
    }

    if (j.contains("points"))
        for (const auto& p : j.at("points")) {
            auto v = p.get<std::vector<double>>();
            if (static_cast<int>(v.size()) != sc.n) throw DataError("scenario point has wrong dimension");
            sc.points.push_back(std::move(v));
        }

    // Every declared point must lie in the domain of every named map.
    for (const auto& [name, m] : sc.maps)
        for (const auto& p : sc.points)
            if (!m.in_domain(p))
                throw DataError("scenario point outside the domain of map \"" + name + "\"");
    return sc;
}

Scenario Scenario::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scenario file \"" + path + "\"");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError(std::string("scenario JSON parse error: ") + e.what());
    }
    return from_json(j);
}

const Diffeo& Scenario::map(const std::string& name) const {
    auto it = maps.find(name);
    if (it == maps.end()) throw DataError("scenario has no map named \"" + name + "\"");
    return it->second;
}

namespace {

std::string idx1(int i) { return std::to_string(i + 1); }

json t21_json(const Tensor21Value& v) {
    json out = json::object();
    for (int k = 0; k < v.n; ++k)
        for (int i = 0; i < v.n; ++i)
            for (int j = i; j < v.n; ++j) {
                double val = v(k, i, j);
                if (val != 0.0) out[idx1(k) + "," + idx1(i) + "," + idx1(j)] = val;
            }
    return out;
}

json s2_json(const S2OperatorValue& v) {
    json t = json::object(), u = json::object();
    for (int k = 0; k < v.n; ++k)
        for (int i = 0; i < v.n; ++i)
            for (int j = i; j < v.n; ++j)
                if (v.t_at(k, i, j) != 0.0) t[idx1(k) + "," + idx1(i) + "," + idx1(j)] = v.t_at(k, i, j);
    for (int i = 0; i < v.n; ++i)
        for (int j = i; j < v.n; ++j)
            if (v.u_at(i, j) != 0.0) u[idx1(i) + "," + idx1(j)] = v.u_at(i, j);
    return json{{"t", t}, {"u", u}};
}

template <typename V>
json triple_json(const V& v, const char* k2, const char* k1, const char* k0) {
    json a2 = json::object(), a1 = json::object();
    for (int i = 0; i < v.n; ++i)
        for (int j = i; j < v.n; ++j)
            if (v.a2_at(i, j) != 0.0) a2[idx1(i) + "," + idx1(j)] = v.a2_at(i, j);
    for (int i = 0; i < v.n; ++i)
        if (v.a1[i] != 0.0) a1[idx1(i)] = v.a1[i];
    json out = json::object();
    out[k2] = a2;
    out[k1] = a1;
    if (v.a0 != 0.0) out[k0] = v.a0;
    return out;
}

}  // namespace

json eval_command(const Scenario& sc, const std::string& what, const std::string& map_name,
                  std::span<const double> at) {
    if (static_cast<int>(at.size()) != sc.n) throw DataError("evaluation point has wrong dimension");
    auto need_map = [&]() -> const Diffeo& { return sc.map(map_name); };
    auto need_lambda = [&]() -> double {
        if (!sc.lambda) throw DataError("this evaluation needs \"lambda\" in the scenario");
        return *sc.lambda;
    };
    auto need_op = [&]() -> std::shared_ptr<ExprOperatorField> {
        if (!sc.op) throw DataError("this evaluation needs \"operator\" in the scenario");
        return sc.op;
    };

    if (what == "ell") return t21_json(ell_cocycle(need_map(), sc.connection, at));
    if (what == "schwarzian") return s2_json(schwarzian(need_map(), sc.connection, at));
    if (what == "tdiff") {
        if (!sc.connection2) throw DataError("tdiff needs \"connection2\" (the tilde field) in the scenario");
        return s2_json(t_difference(*sc.connection2, sc.connection, at));
    }
    if (what == "classical") return json(classical_schwarzian(need_map(), at[0]));
    if (what == "symbol") return triple_json(symbol_map(*need_op(), need_lambda(), at), "a2bar", "a1bar", "a0bar");
    if (what == "act-direct")
        return triple_json(act_direct(need_map(), need_lambda(), *need_op(), at), "b2", "b1", "b0");
    if (what == "act-explicit") {
        auto op = need_op();
        double lambda = need_lambda();
        SymbolValue v = act_explicit(need_map(), lambda, SigmaField(op, lambda), at);
        return triple_json(v, "a2bar", "a1bar", "a0bar");
    }
    if (what == "sturm-liouville") {
        if (!sc.potential.defined()) throw DataError("sturm-liouville needs an operator a0 (the potential) in the scenario");
        SturmResult r = sturm_liouville_act(need_map(), sc.potential, at[0]);
        return json{{"v", r.v}, {"convention_notes", r.convention_notes}};
    }
    throw DataError("unknown eval target \"" + what +
                    "\"; expected ell|schwarzian|tdiff|classical|symbol|act-direct|act-explicit|sturm-liouville");
}

json error_json(const std::exception& e) {
    std::string kind = "error";
    if (dynamic_cast<const ParseError*>(&e))
        kind = "parse";
    else if (dynamic_cast<const SingularError*>(&e))
        kind = "singular";
    else if (dynamic_cast<const DomainError*>(&e))
        kind = "domain";
    else if (dynamic_cast<const DimensionError*>(&e))
        kind = "dimension";
    else if (dynamic_cast<const DataError*>(&e))
        kind = "data";
    return json{{"error", {{"kind", kind}, {"message", e.what()}}}};
}

json to_json(const CheckReport& r) {
    return json{{"check", r.name},         {"seed", r.seed},
                {"trials", r.trials},      {"tol", r.tol},
                {"max_abs_err", r.max_abs_err}, {"max_rel_err", r.max_rel_err},
                {"inverted", r.inverted},  {"pass", r.pass},
                {"notes", r.notes}};
}

}  // namespace schw
