// Command-line entry points: scenario evaluation and the property-check
// suite with JSON reporting.

#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "schw/checks.hpp"
#include "schw/scenario.hpp"

using nlohmann::json;

namespace {

std::vector<double> parse_point(const std::string& s) {
    std::vector<double> v;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            v.push_back(std::stod(tok));
        } catch (...) {
            throw schw::DataError("--at expects comma-separated numbers, got \"" + s + "\"");
        }
    }
    if (v.empty()) throw schw::DataError("--at expects at least one coordinate");
    return v;
}

void print_report_line(const schw::CheckReport& r) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << "  trials=" << r.trials << " tol=" << r.tol
              << (r.inverted ? " witness=" : " max_rel_err=") << r.max_rel_err << "\n";
    for (const auto& n : r.notes) std::cout << "       " << n << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"projectively equivariant Schwarzian derivative toolkit"};
    app.require_subcommand(1);

    auto* eval = app.add_subcommand("eval", "evaluate one object from a scenario file");
    std::string scenario_path, what, map_name, at_str;
    eval->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    eval->add_option("--what", what,
                     "ell|schwarzian|tdiff|classical|symbol|act-direct|act-explicit|sturm-liouville")
        ->required();
    eval->add_option("--map", map_name, "map name from the scenario");
    eval->add_option("--at", at_str, "evaluation point \"v1,v2,...\"")->required();

    auto* check = app.add_subcommand("check", "run property checks");
    std::string suite = "all";
    std::uint64_t seed = 42;
    int trials_flag = -1;
    double tol_flag = -1.0;
    bool as_json = false;
    check->add_option("--suite", suite, "all or a check name");
    check->add_option("--seed", seed, "random seed");
    check->add_option("--trials", trials_flag, "override trial count");
    check->add_option("--tol", tol_flag, "override tolerance");
    check->add_flag("--json", as_json, "emit JSON reports");

    auto* list = app.add_subcommand("list-checks", "list the registered checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eval->parsed()) {
            schw::Scenario sc = schw::Scenario::load(scenario_path);
            std::vector<double> at = parse_point(at_str);
            json out = schw::eval_command(sc, what, map_name, at);
            std::cout << out.dump() << "\n";
            return 0;
        }
        if (list->parsed()) {
            for (const auto& d : schw::check_registry())
                std::cout << d.name << "  (trials=" << d.default_trials << ", tol=" << d.default_tol << ")  "
                          << d.summary << "\n";
            return 0;
        }
        if (check->parsed()) {
            std::optional<int> trials;
            std::optional<double> tol;
            if (trials_flag > 0) trials = trials_flag;
            if (tol_flag > 0.0) tol = tol_flag;

            std::vector<schw::CheckReport> reports;
            if (suite == "all")
                reports = schw::run_all_checks(seed, trials, tol);
            else
                reports.push_back(schw::run_check(suite, seed, trials, tol));

            bool all_pass = !reports.empty();
            for (const auto& r : reports) all_pass = all_pass && r.pass;
            if (suite == "all" && reports.size() != schw::check_registry().size()) all_pass = false;

            if (as_json) {
                json arr = json::array();
                for (const auto& r : reports) arr.push_back(schw::to_json(r));
                std::cout << arr.dump(2) << "\n";
            } else {
                for (const auto& r : reports) print_report_line(r);
                std::cout << (all_pass ? "all checks passed" : "CHECKS FAILED") << "\n";
            }
            return all_pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cout << schw::error_json(e).dump() << "\n";
        return 2;
    }
    return 0;
}
