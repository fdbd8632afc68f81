// Batch front-end: load a .cdmn workbook, compile it, solve per its goal
// table, and print the results.
//
// Exit codes: 0 solved, 1 unsat, 2 usage or compile error, 3 resource limit.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "cdmn/cdmn.hpp"

namespace {

struct Options {
    std::string path;
    std::string models_flag;      // "", a number, or "all"
    std::string format = "text";
    bool emit_theory = false;
    long long max_nodes = -1;
    long long max_ground = 10'000'000;
    double timeout = -1;
};

constexpr int kExitOk = 0;
constexpr int kExitUnsat = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw cdmn::Error(cdmn::ErrorCode::EmptyModel, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::optional<long long> parse_models_flag(const std::string& flag) {
    if (flag.empty()) return std::nullopt;
    if (flag == "all") return cdmn::Task::kAll;
    try {
        long long n = std::stoll(flag);
        if (n <= 0) throw std::invalid_argument("not positive");
        return n;
    } catch (const std::exception&) {
        throw cdmn::Error(cdmn::ErrorCode::MalformedGoal,
                          "--models expects a positive integer or 'all', got '" + flag + "'");
    }
}

int run_check(const Options& opt) {
    cdmn::CompiledModel model = cdmn::compile_workbook(read_file(opt.path));
    if (opt.emit_theory) {
        for (const auto& sentence : model.theory.sentences)
            std::cout << cdmn::to_string(*sentence) << "\n";
        return kExitOk;
    }
    std::cout << "ok: " << model.vocabulary.types.size() - 1 << " types, "
              << model.vocabulary.symbols.size() << " symbols, "
              << model.theory.sentences.size() << " sentences\n";
    return kExitOk;
}

int run_solve(const Options& opt) {
    cdmn::CompiledModel model = cdmn::compile_workbook(read_file(opt.path));
    cdmn::EngineLimits limits;
    limits.max_nodes = opt.max_nodes;
    limits.max_ground = opt.max_ground;
    limits.timeout_seconds = opt.timeout;

    cdmn::SolveResult result = cdmn::run_task(model, parse_models_flag(opt.models_flag), limits);

    if (opt.format == "json") {
        std::cout << cdmn::result_to_json(result, model).dump(2) << "\n";
    } else {
        switch (result.status) {
            case cdmn::SolveResult::Status::Models:
                for (std::size_t i = 0; i < result.models.size(); ++i) {
                    std::cout << "model " << i + 1 << ":\n"
                              << cdmn::structure_to_text(result.models[i], model.vocabulary);
                }
                if (result.exhausted)
                    std::cout << "(no further models exist)\n";
                break;
            case cdmn::SolveResult::Status::Optimum:
                std::cout << "optimum:\n"
                          << cdmn::structure_to_text(result.models[0], model.vocabulary)
                          << "objective = " << result.objective << "\n";
                break;
            case cdmn::SolveResult::Status::Unsat:
                std::cout << "unsat\n";
                break;
            case cdmn::SolveResult::Status::Error:
                break;
        }
        std::cerr << "stats: cells=" << result.stats.cells
                  << " ground=" << result.stats.ground_constraints
                  << " nodes=" << result.stats.nodes
                  << " elapsed=" << result.stats.elapsed_seconds << "s\n";
    }

    switch (result.status) {
        case cdmn::SolveResult::Status::Models:
        case cdmn::SolveResult::Status::Optimum:
            return kExitOk;
        case cdmn::SolveResult::Status::Unsat:
            return kExitUnsat;
        case cdmn::SolveResult::Status::Error:
            std::cerr << "error: " << result.error_message << "\n";
            return result.error == cdmn::ErrorCode::ResourceLimit ||
                           result.error == cdmn::ErrorCode::DomainBlowup ||
                           result.error == cdmn::ErrorCode::OracleBlowup
                       ? kExitResource
                       : kExitUsage;
    }
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cdmn: compile and solve cDMN workbooks"};
    app.require_subcommand(1);

    Options opt;
    CLI::App* solve = app.add_subcommand("solve", "compile a workbook and compute models");
    solve->add_option("path", opt.path, "workbook file (.cdmn)")->required();
    solve->add_option("--models", opt.models_flag,
                      "number of models to compute, or 'all' (overrides the goal table)");
    solve->add_option("--format", opt.format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    solve->add_option("--max-nodes", opt.max_nodes, "search node cap (-1 = unlimited)");
    solve->add_option("--max-ground", opt.max_ground, "ground instantiation cap");
    solve->add_option("--timeout", opt.timeout, "wall-clock budget in seconds (-1 = unlimited)");

    CLI::App* check = app.add_subcommand("check", "compile a workbook without solving");
    check->add_option("path", opt.path, "workbook file (.cdmn)")->required();
    check->add_flag("--emit-theory", opt.emit_theory,
                    "print the compiled theory in logic syntax");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (solve->parsed()) return run_solve(opt);
        return run_check(opt);
    } catch (const cdmn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case cdmn::ErrorCode::ResourceLimit:
            case cdmn::ErrorCode::DomainBlowup:
            case cdmn::ErrorCode::OracleBlowup:
                return kExitResource;
            default:
                return kExitUsage;
        }
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitUsage;
    }
}
