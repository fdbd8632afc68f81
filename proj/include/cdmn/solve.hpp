#ifndef CDMN_SOLVE_HPP
#define CDMN_SOLVE_HPP

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "cdmn/ground.hpp"

namespace cdmn {

struct SolveStats {
    long long nodes = 0;
    long long ground_constraints = 0;
    long long cells = 0;
    double elapsed_seconds = 0;
};

struct SolveResult {
    enum class Status { Models, Optimum, Unsat, Error };

    Status status = Status::Unsat;
    std::vector<Structure> models;   // Models: first N in search order; Optimum: the single optimum
    long long objective = 0;         // Optimum
    ErrorCode error = ErrorCode::ResourceLimit;
    std::string error_message;
    bool exhausted = false; // fewer models exist than requested
    SolveStats stats;
};

namespace detail {

class Searcher {
public:
    Searcher(GroundProblem& problem, const EngineLimits& limits)
        : p_(problem), limits_(limits), start_(std::chrono::steady_clock::now()) {
        assignment_.assign(p_.cells.size(), kUnassigned);
        watch_.resize(p_.cells.size());
        for (std::size_t c = 0; c < p_.constraints.size(); ++c)
            for (int cell : p_.constraints[c].cells) watch_[cell].push_back(static_cast<int>(c));
        if (p_.objective) {
            std::set<int> cells;
            collect_cells(*p_.objective, p_, cells);
            for (int cell : cells) objective_watch_.push_back(cell);
        }
    }

    // Applies unary ground constraints to cell domains up front, then drops
    // them from the active set.
    bool prefilter_unary() {
        for (std::size_t c = 0; c < p_.constraints.size(); ++c) {
            const GroundConstraint& gc = p_.constraints[c];
            if (gc.cells.size() != 1) continue;
            int cell = gc.cells[0];
            std::vector<Value> keep;
            for (std::size_t v = 0; v < p_.cells[cell].domain.size(); ++v) {
                assignment_[cell] = static_cast<int>(v);
                GroundEvalContext ctx{&p_, &assignment_};
                if (geval_formula(*gc.formula, ctx)) keep.push_back(p_.cells[cell].domain[v]);
            }
            assignment_[cell] = kUnassigned;
            p_.cells[cell].domain = std::move(keep);
            disabled_.insert(static_cast<int>(c));
            if (p_.cells[cell].domain.empty()) return false;
        }
        return true;
    }

    template <typename OnModel>
    bool search(std::size_t depth, OnModel&& on_model) {
        check_limits();
        if (depth == p_.cells.size()) {
            Structure s = assignment_to_structure(p_, assignment_);
            verify_model(s);
            return on_model(s, assignment_);
        }
        for (std::size_t v = 0; v < p_.cells[depth].domain.size(); ++v) {
            ++stats_nodes_;
            assignment_[depth] = static_cast<int>(v);
            if (consistent(static_cast<int>(depth)) && bound_admits(depth)) {
                if (!search(depth + 1, on_model)) return false;
            }
            assignment_[depth] = kUnassigned;
        }
        return true;
    }

    long long nodes() const { return stats_nodes_; }
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    // Branch-and-bound hook: when the objective's cells are all assigned and
    // the value cannot beat the incumbent, the subtree is pruned.
    std::optional<long long> incumbent;
    bool maximize = false;
    bool use_bound = false;

    std::optional<long long> objective_value_if_ready() {
        if (!p_.objective) return std::nullopt;
        for (int cell : objective_watch_)
            if (assignment_[cell] == kUnassigned) return std::nullopt;
        GroundEvalContext ctx{&p_, &assignment_};
        Value v = geval_term(*p_.objective, ctx);
        if (v.is_null())
            throw Error(ErrorCode::NullPropagation, "the optimization objective evaluates to null");
        return require_int(v, "objective");
    }

private:
    // After assigning `cell`, evaluate every constraint that just became
    // fully assigned, and forward-check binary constraints with one open end.
    bool consistent(int cell) {
        for (int ci : watch_[cell]) {
            if (disabled_.count(ci)) continue;
            const GroundConstraint& gc = p_.constraints[ci];
            int open = 0;
            int open_cell = -1;
            for (int dep : gc.cells)
                if (assignment_[dep] == kUnassigned) {
                    ++open;
                    open_cell = dep;
                }
            if (open == 0) {
                GroundEvalContext ctx{&p_, &assignment_};
                if (!geval_formula(*gc.formula, ctx)) return false;
            } else if (open == 1 && gc.cells.size() == 2) {
                // Forward checking: the open endpoint must still have a
                // supporting value.
                bool supported = false;
                for (std::size_t v = 0; v < p_.cells[open_cell].domain.size() && !supported; ++v) {
                    assignment_[open_cell] = static_cast<int>(v);
                    GroundEvalContext ctx{&p_, &assignment_};
                    supported = geval_formula(*gc.formula, ctx);
                }
                assignment_[open_cell] = kUnassigned;
                if (!supported) return false;
            }
        }
        return true;
    }

    bool bound_admits(std::size_t) {
        if (!use_bound) return true;
        auto value = objective_value_if_ready();
        if (!value || !incumbent) return true;
        return maximize ? *value > *incumbent : *value < *incumbent;
    }

    void check_limits() {
        if (limits_.max_nodes >= 0 && stats_nodes_ > limits_.max_nodes)
            throw Error(ErrorCode::ResourceLimit,
                        "search exceeded the node cap of " + std::to_string(limits_.max_nodes));
        if (limits_.timeout_seconds >= 0 && elapsed() > limits_.timeout_seconds)
            throw Error(ErrorCode::ResourceLimit, "search exceeded the wall-clock budget");
        if (limits_.cancel && limits_.cancel->load())
            throw Error(ErrorCode::ResourceLimit, "search cancelled");
    }

    // Soundness: every structure handed out must satisfy the untranslated
    // theory under eval_formula.
    void verify_model(const Structure& s) {
        for (const auto& sentence : p_.model->theory.sentences) {
            if (!eval_sentence(sentence, s))
                throw std::logic_error("internal: search produced a structure that fails '" +
                                       to_string(*sentence) + "'");
        }
    }

    GroundProblem& p_;
    const EngineLimits& limits_;
    std::chrono::steady_clock::time_point start_;
    std::vector<int> assignment_;
    std::vector<std::vector<int>> watch_; // cell -> constraint indices
    std::set<int> disabled_;
    long long stats_nodes_ = 0;
    std::vector<int> objective_watch_;
};

inline SolveResult error_result(const Error& e, const GroundProblem& p, long long nodes,
                                double elapsed) {
    SolveResult r;
    r.status = SolveResult::Status::Error;
    r.error = e.code();
    r.error_message = e.what();
    r.stats.nodes = nodes;
    r.stats.ground_constraints = static_cast<long long>(p.constraints.size());
    r.stats.cells = static_cast<long long>(p.cells.size());
    r.stats.elapsed_seconds = elapsed;
    return r;
}

} // namespace detail

// Backtracking search over cells in a fixed deterministic order (symbol name,
// then argument tuple; values in domain order). Returns the first `count`
// models in search order, or all of them for Task::kAll.
inline SolveResult solve_models(GroundProblem& problem, long long count,
                                const EngineLimits& limits = {}) {
    SolveResult result;
    result.stats.ground_constraints = static_cast<long long>(problem.constraints.size());
    result.stats.cells = static_cast<long long>(problem.cells.size());
    detail::Searcher searcher(problem, limits);
    try {
        if (problem.trivially_false || !searcher.prefilter_unary()) {
            result.status = SolveResult::Status::Unsat;
            result.exhausted = count != Task::kAll;
            result.stats.elapsed_seconds = searcher.elapsed();
            return result;
        }
        bool completed = searcher.search(0, [&](const Structure& s, const std::vector<int>&) {
            result.models.push_back(s);
            return count == Task::kAll ||
                   static_cast<long long>(result.models.size()) < count;
        });
        result.status = result.models.empty() ? SolveResult::Status::Unsat
                                              : SolveResult::Status::Models;
        result.exhausted =
            completed && count != Task::kAll && static_cast<long long>(result.models.size()) < count;
    } catch (const Error& e) {
        return detail::error_result(e, problem, searcher.nodes(), searcher.elapsed());
    }
    result.stats.nodes = searcher.nodes();
    result.stats.elapsed_seconds = searcher.elapsed();
    return result;
}

// Branch-and-bound over the same search order; returns one optimal structure
// and the optimal objective value. Among equal-objective models the first in
// search order wins.
inline SolveResult solve_optimize(GroundProblem& problem, Task::Kind direction,
                                  const EngineLimits& limits = {}) {
    SolveResult result;
    result.stats.ground_constraints = static_cast<long long>(problem.constraints.size());
    result.stats.cells = static_cast<long long>(problem.cells.size());
    if (!problem.objective) {
        result.status = SolveResult::Status::Error;
        result.error = ErrorCode::MalformedGoal;
        result.error_message = "no objective term was ground for this problem";
        return result;
    }
    detail::Searcher searcher(problem, limits);
    searcher.maximize = direction == Task::Kind::Maximize;
    searcher.use_bound = true;
    std::optional<Structure> best;
    try {
        if (problem.trivially_false || !searcher.prefilter_unary()) {
            result.status = SolveResult::Status::Unsat;
            result.stats.elapsed_seconds = searcher.elapsed();
            return result;
        }
        searcher.search(0, [&](const Structure& s, const std::vector<int>&) {
            auto value = searcher.objective_value_if_ready();
            if (!value)
                throw Error(ErrorCode::MalformedGoal,
                            "objective did not evaluate on a total structure");
            if (!searcher.incumbent ||
                (searcher.maximize ? *value > *searcher.incumbent
                                   : *value < *searcher.incumbent)) {
                searcher.incumbent = *value;
                best = s;
            }
            return true; // keep searching for a better objective
        });
    } catch (const Error& e) {
        return detail::error_result(e, problem, searcher.nodes(), searcher.elapsed());
    }
    result.stats.nodes = searcher.nodes();
    result.stats.elapsed_seconds = searcher.elapsed();
    if (!best) {
        result.status = SolveResult::Status::Unsat;
        return result;
    }
    result.status = SolveResult::Status::Optimum;
    result.models.push_back(std::move(*best));
    result.objective = *searcher.incumbent;
    return result;
}

// Deliberately naive verification oracle: enumerates every total extension
// of the data structure in lexicographic cell order and filters with
// eval_formula over the untranslated theory.
inline std::vector<Structure> oracle_enumerate(const CompiledModel& model,
                                               const EngineLimits& limits = {}) {
    std::vector<Cell> cells;
    std::map<std::pair<std::string, std::vector<Value>>, int> index;
    detail::build_cells(model, cells, index);

    long double space = 1;
    for (const auto& cell : cells) {
        space *= static_cast<long double>(cell.domain.size());
        if (space > static_cast<long double>(limits.oracle_cap))
            throw Error(ErrorCode::OracleBlowup,
                        "oracle space exceeds the cap of " + std::to_string(limits.oracle_cap));
    }

    GroundProblem shell; // reuse the structure builder
    shell.model = &model;
    shell.cells = cells;
    shell.cell_index = index;

    std::vector<Structure> models;
    std::vector<int> odometer(cells.size(), 0);
    if (cells.empty()) {
        Structure s = detail::assignment_to_structure(shell, odometer);
        bool ok = true;
        for (const auto& sentence : model.theory.sentences)
            ok = ok && eval_sentence(sentence, s);
        if (ok) models.push_back(std::move(s));
        return models;
    }
    for (const auto& cell : cells)
        if (cell.domain.empty()) return models; // no total extension exists
    bool done = false;
    while (!done) {
        Structure s = detail::assignment_to_structure(shell, odometer);
        bool ok = true;
        for (const auto& sentence : model.theory.sentences)
            ok = ok && eval_sentence(sentence, s);
        if (ok) models.push_back(std::move(s));
        // advance odometer, last cell fastest
        int pos = static_cast<int>(cells.size()) - 1;
        while (pos >= 0) {
            if (++odometer[pos] < static_cast<int>(cells[pos].domain.size())) break;
            odometer[pos] = 0;
            --pos;
        }
        if (pos < 0) done = true;
    }
    return models;
}

// Convenience: compile-to-result pipeline used by the CLI and tests.
inline SolveResult run_task(const CompiledModel& model, std::optional<long long> model_count,
                            const EngineLimits& limits = {}) {
    GroundProblem problem = ground(model, limits);
    if (model.task.kind == Task::Kind::ModelExpand)
        return solve_models(problem, model_count.value_or(model.task.count), limits);
    return solve_optimize(problem, model.task.kind, limits);
}

} // namespace cdmn

#endif
