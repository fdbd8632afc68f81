#ifndef CDMN_GROUND_HPP
#define CDMN_GROUND_HPP

#include <atomic>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cdmn/error.hpp"
#include "cdmn/fo.hpp"
#include "cdmn/translate.hpp"

namespace cdmn {

struct EngineLimits {
    long long max_ground = 10'000'000; // ground instantiation cap
    long long max_nodes = -1;          // search node cap, -1 = unlimited
    double timeout_seconds = -1;       // wall clock budget, -1 = unlimited
    long long oracle_cap = 1'000'000;  // oracle enumeration cap
    const std::atomic<bool>* cancel = nullptr;
};

// One ground assignment decision: a function value for a fixed argument
// tuple, a relation tuple's truth value, a constant, or a proposition.
struct Cell {
    std::string symbol;
    std::vector<Value> args;
    std::vector<Value> domain; // candidate values, search tries them in order
    bool is_relation = false;

    std::string describe() const {
        if (args.empty()) return symbol;
        std::string out = symbol + "(";
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) out += ", ";
            out += args[i].str();
        }
        return out + ")";
    }
};

// ---------------------------------------------------------------------------
// Ground terms and formulas over cells
// ---------------------------------------------------------------------------

struct GTerm;
struct GFormula;
using GTermPtr = std::shared_ptr<const GTerm>;
using GFormulaPtr = std::shared_ptr<const GFormula>;

struct GTerm {
    enum class Kind { Const, Cell, Arith, Agg, FuncSelect };

    Kind kind = Kind::Const;
    Value constant;                                     // Const
    int cell = -1;                                      // Cell
    ArithOp op = ArithOp::Add;                          // Arith
    GTermPtr lhs, rhs;                                  // Arith
    AggKind agg = AggKind::Sum;                         // Agg
    std::vector<std::pair<GFormulaPtr, GTermPtr>> branches; // Agg
    std::string symbol;                                 // FuncSelect
    std::vector<GTermPtr> sel_args;                     // FuncSelect

    static GTermPtr mk_const(Value v) {
        auto t = std::make_shared<GTerm>();
        t->kind = Kind::Const;
        t->constant = std::move(v);
        return t;
    }
    static GTermPtr mk_cell(int idx) {
        auto t = std::make_shared<GTerm>();
        t->kind = Kind::Cell;
        t->cell = idx;
        return t;
    }
    static GTermPtr mk_arith(ArithOp op, GTermPtr l, GTermPtr r) {
        auto t = std::make_shared<GTerm>();
        t->kind = Kind::Arith;
        t->op = op;
        t->lhs = std::move(l);
        t->rhs = std::move(r);
        return t;
    }
    static GTermPtr mk_agg(AggKind kind, std::vector<std::pair<GFormulaPtr, GTermPtr>> branches) {
        auto t = std::make_shared<GTerm>();
        t->kind = Kind::Agg;
        t->agg = kind;
        t->branches = std::move(branches);
        return t;
    }
    static GTermPtr mk_select(std::string symbol, std::vector<GTermPtr> args) {
        auto t = std::make_shared<GTerm>();
        t->kind = Kind::FuncSelect;
        t->symbol = std::move(symbol);
        t->sel_args = std::move(args);
        return t;
    }
};

struct GFormula {
    enum class Kind { Const, CellBool, Cmp, Not, And, Or, PredSelect };

    Kind kind = Kind::Const;
    bool truth = false;                 // Const
    int cell = -1;                      // CellBool
    CmpOp cmp = CmpOp::Eq;              // Cmp
    GTermPtr lhs, rhs;                  // Cmp
    GFormulaPtr child;                  // Not
    std::vector<GFormulaPtr> children;  // And, Or
    std::string symbol;                 // PredSelect
    std::vector<GTermPtr> sel_args;     // PredSelect

    static GFormulaPtr mk_const(bool b) {
        auto f = std::make_shared<GFormula>();
        f->kind = Kind::Const;
        f->truth = b;
        return f;
    }
    static GFormulaPtr mk_cell(int idx) {
        auto f = std::make_shared<GFormula>();
        f->kind = Kind::CellBool;
        f->cell = idx;
        return f;
    }
    static GFormulaPtr mk_cmp(CmpOp op, GTermPtr l, GTermPtr r) {
        auto f = std::make_shared<GFormula>();
        f->kind = Kind::Cmp;
        f->cmp = op;
        f->lhs = std::move(l);
        f->rhs = std::move(r);
        return f;
    }
    static GFormulaPtr mk_not(GFormulaPtr g) {
        if (g->kind == Kind::Const) return mk_const(!g->truth);
        auto f = std::make_shared<GFormula>();
        f->kind = Kind::Not;
        f->child = std::move(g);
        return f;
    }
    static GFormulaPtr mk_and(std::vector<GFormulaPtr> children) {
        std::vector<GFormulaPtr> keep;
        for (auto& c : children) {
            if (c->kind == Kind::Const) {
                if (!c->truth) return mk_const(false);
                continue;
            }
            if (c->kind == Kind::And) {
                for (const auto& cc : c->children) keep.push_back(cc);
                continue;
            }
            keep.push_back(std::move(c));
        }
        if (keep.empty()) return mk_const(true);
        if (keep.size() == 1) return keep[0];
        auto f = std::make_shared<GFormula>();
        f->kind = Kind::And;
        f->children = std::move(keep);
        return f;
    }
    static GFormulaPtr mk_or(std::vector<GFormulaPtr> children) {
        std::vector<GFormulaPtr> keep;
        for (auto& c : children) {
            if (c->kind == Kind::Const) {
                if (c->truth) return mk_const(true);
                continue;
            }
            if (c->kind == Kind::Or) {
                for (const auto& cc : c->children) keep.push_back(cc);
                continue;
            }
            keep.push_back(std::move(c));
        }
        if (keep.empty()) return mk_const(false);
        if (keep.size() == 1) return keep[0];
        auto f = std::make_shared<GFormula>();
        f->kind = Kind::Or;
        f->children = std::move(keep);
        return f;
    }
    static GFormulaPtr mk_select(std::string symbol, std::vector<GTermPtr> args) {
        auto f = std::make_shared<GFormula>();
        f->kind = Kind::PredSelect;
        f->symbol = std::move(symbol);
        f->sel_args = std::move(args);
        return f;
    }
};

struct GroundConstraint {
    GFormulaPtr formula;
    std::vector<int> cells; // referenced cells, sorted unique
    Provenance origin;
};

struct GroundProblem {
    const CompiledModel* model = nullptr;
    std::vector<Cell> cells;
    std::map<std::pair<std::string, std::vector<Value>>, int> cell_index;
    std::vector<GroundConstraint> constraints;
    bool trivially_false = false;
    GTermPtr objective; // ground optimization term, when the task optimizes
    long long instantiations = 0;

    int find_cell(const std::string& symbol, const std::vector<Value>& args) const {
        auto it = cell_index.find({symbol, args});
        return it == cell_index.end() ? -1 : it->second;
    }
};

// ---------------------------------------------------------------------------
// Evaluation of ground expressions under a (partial) assignment
// ---------------------------------------------------------------------------

namespace detail {

constexpr int kUnassigned = -1;

struct GroundEvalContext {
    const GroundProblem* problem;
    // assignment[i] indexes into cells[i].domain; kUnassigned when open.
    const std::vector<int>* assignment;

    Value cell_value(int cell) const {
        int idx = (*assignment)[cell];
        if (idx == kUnassigned)
            throw Error(ErrorCode::MalformedExpression,
                        "internal: evaluated an unassigned cell '" +
                            problem->cells[cell].describe() + "'");
        return problem->cells[cell].domain[idx];
    }
};

inline Value geval_term(const GTerm& t, const GroundEvalContext& ctx);

inline bool geval_formula(const GFormula& f, const GroundEvalContext& ctx) {
    switch (f.kind) {
        case GFormula::Kind::Const: return f.truth;
        case GFormula::Kind::CellBool: return ctx.cell_value(f.cell).as_bool();
        case GFormula::Kind::Cmp:
            return eval_cmp(f.cmp, geval_term(*f.lhs, ctx), geval_term(*f.rhs, ctx));
        case GFormula::Kind::Not: return !geval_formula(*f.child, ctx);
        case GFormula::Kind::And:
            for (const auto& c : f.children)
                if (!geval_formula(*c, ctx)) return false;
            return true;
        case GFormula::Kind::Or:
            for (const auto& c : f.children)
                if (geval_formula(*c, ctx)) return true;
            return false;
        case GFormula::Kind::PredSelect: {
            std::vector<Value> args;
            for (const auto& a : f.sel_args) {
                args.push_back(geval_term(*a, ctx));
                if (args.back().is_null()) return false;
            }
            const Structure& data = ctx.problem->model->data;
            auto rit = data.rels.find(f.symbol);
            if (rit != data.rels.end()) return rit->second.count(args) > 0;
            int cell = ctx.problem->find_cell(f.symbol, args);
            if (cell < 0)
                throw Error(ErrorCode::MalformedExpression,
                            "internal: no cell for relation tuple of '" + f.symbol + "'");
            return ctx.cell_value(cell).as_bool();
        }
    }
    return false;
}

inline Value geval_term(const GTerm& t, const GroundEvalContext& ctx) {
    switch (t.kind) {
        case GTerm::Kind::Const: return t.constant;
        case GTerm::Kind::Cell: return ctx.cell_value(t.cell);
        case GTerm::Kind::Arith: {
            Value l = geval_term(*t.lhs, ctx);
            Value r = geval_term(*t.rhs, ctx);
            if (l.is_null() || r.is_null()) return Value::null_value();
            long long a = require_int(l, "arithmetic");
            long long b = require_int(r, "arithmetic");
            switch (t.op) {
                case ArithOp::Add: return Value::integer(a + b);
                case ArithOp::Sub: return Value::integer(a - b);
                case ArithOp::Mul: return Value::integer(a * b);
                case ArithOp::Div:
                    if (b == 0) throw Error(ErrorCode::DivisionByZero, "division by zero");
                    if (a % b != 0)
                        throw Error(ErrorCode::InexactDivision,
                                    std::to_string(a) + " is not divisible by " + std::to_string(b));
                    return Value::integer(a / b);
            }
            return Value::null_value();
        }
        case GTerm::Kind::Agg: {
            bool any = false, saw_null = false;
            long long acc = 0;
            for (const auto& [cond, value] : t.branches) {
                if (!geval_formula(*cond, ctx)) continue;
                Value v = geval_term(*value, ctx);
                if (v.is_null()) {
                    saw_null = true;
                    continue;
                }
                long long n = require_int(v, "aggregate");
                if (!any) {
                    acc = n;
                    any = true;
                } else {
                    switch (t.agg) {
                        case AggKind::Sum: acc += n; break;
                        case AggKind::Min: acc = std::min(acc, n); break;
                        case AggKind::Max: acc = std::max(acc, n); break;
                    }
                }
            }
            if (saw_null) return Value::null_value();
            if (!any) {
                if (t.agg == AggKind::Sum) return Value::integer(0);
                throw Error(ErrorCode::MinMaxOfEmptySet,
                            "min/max aggregate over an empty satisfying set");
            }
            return Value::integer(acc);
        }
        case GTerm::Kind::FuncSelect: {
            std::vector<Value> args;
            for (const auto& a : t.sel_args) {
                args.push_back(geval_term(*a, ctx));
                if (args.back().is_null()) return Value::null_value();
            }
            const Structure& data = ctx.problem->model->data;
            auto fit = data.funcs.find(t.symbol);
            if (fit != data.funcs.end()) {
                auto vit = fit->second.find(args);
                if (vit == fit->second.end())
                    throw Error(ErrorCode::MalformedExpression,
                                "internal: missing data value for '" + t.symbol + "'");
                return vit->second;
            }
            int cell = ctx.problem->find_cell(t.symbol, args);
            if (cell < 0)
                throw Error(ErrorCode::MalformedExpression,
                            "internal: no cell for function tuple of '" + t.symbol + "'");
            return ctx.cell_value(cell);
        }
    }
    return Value::null_value();
}

inline void collect_cells(const GTerm& t, const GroundProblem& p, std::set<int>& out);

inline void collect_cells(const GFormula& f, const GroundProblem& p, std::set<int>& out) {
    switch (f.kind) {
        case GFormula::Kind::Const: return;
        case GFormula::Kind::CellBool: out.insert(f.cell); return;
        case GFormula::Kind::Cmp:
            collect_cells(*f.lhs, p, out);
            collect_cells(*f.rhs, p, out);
            return;
        case GFormula::Kind::Not: collect_cells(*f.child, p, out); return;
        case GFormula::Kind::And:
        case GFormula::Kind::Or:
            for (const auto& c : f.children) collect_cells(*c, p, out);
            return;
        case GFormula::Kind::PredSelect:
            // Conservative: depends on every cell of the selected symbol.
            for (std::size_t i = 0; i < p.cells.size(); ++i)
                if (p.cells[i].symbol == f.symbol) out.insert(static_cast<int>(i));
            for (const auto& a : f.sel_args) collect_cells(*a, p, out);
            return;
    }
}

inline void collect_cells(const GTerm& t, const GroundProblem& p, std::set<int>& out) {
    switch (t.kind) {
        case GTerm::Kind::Const: return;
        case GTerm::Kind::Cell: out.insert(t.cell); return;
        case GTerm::Kind::Arith:
            collect_cells(*t.lhs, p, out);
            collect_cells(*t.rhs, p, out);
            return;
        case GTerm::Kind::Agg:
            for (const auto& [cond, value] : t.branches) {
                collect_cells(*cond, p, out);
                collect_cells(*value, p, out);
            }
            return;
        case GTerm::Kind::FuncSelect:
            for (std::size_t i = 0; i < p.cells.size(); ++i)
                if (p.cells[i].symbol == t.symbol) out.insert(static_cast<int>(i));
            for (const auto& a : t.sel_args) collect_cells(*a, p, out);
            return;
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Cell construction (shared by the grounder and the oracle)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::vector<Value>> arg_tuples(const Signature& sig, const Vocabulary& vocab) {
    std::vector<std::vector<Value>> tuples{{}};
    for (const auto& arg_type : sig.arg_types) {
        const TypeDecl& decl = vocab.type(arg_type);
        std::vector<std::vector<Value>> next;
        for (const auto& tuple : tuples)
            for (const auto& v : decl.domain) {
                auto extended = tuple;
                extended.push_back(v);
                next.push_back(std::move(extended));
            }
        tuples = std::move(next);
    }
    return tuples;
}

inline void build_cells(const CompiledModel& model, std::vector<Cell>& cells,
                        std::map<std::pair<std::string, std::vector<Value>>, int>& index) {
    const Vocabulary& vocab = model.vocabulary;
    for (const auto& [canonical, sig] : vocab.symbols) {
        bool data_interpreted = sig.is_predicate() ? model.data.interprets_rel(canonical)
                                                   : model.data.interprets_func(canonical);
        if (data_interpreted) continue;

        std::vector<Value> value_domain;
        if (sig.is_predicate()) {
            value_domain = {Value::boolean(false), Value::boolean(true)};
        } else {
            if (sig.result_type == kIntType)
                throw Error(ErrorCode::EmptyDomain,
                            "symbol '" + sig.description + "' is typed by the unbounded built-in "
                            "integer type; give it a bounded model type or data");
            const TypeDecl& decl = vocab.type(sig.result_type);
            value_domain = decl.domain;
            if (model.null_extended.count(canonical))
                value_domain.push_back(Value::null_value());
            if (value_domain.empty())
                throw Error(ErrorCode::EmptyDomain,
                            "type '" + sig.result_type + "' of symbol '" + sig.description +
                                "' has an empty domain; enumerate it in the glossary or data");
        }

        for (auto& tuple : arg_tuples(sig, vocab)) {
            Cell cell;
            cell.symbol = canonical;
            cell.args = tuple;
            cell.domain = value_domain;
            cell.is_relation = sig.is_predicate();
            index[{canonical, tuple}] = static_cast<int>(cells.size());
            cells.push_back(std::move(cell));
        }
    }
}

// Builds a total structure from the data structure plus a full assignment.
inline Structure assignment_to_structure(const GroundProblem& p, const std::vector<int>& assignment) {
    Structure s = p.model->data;
    for (const auto& [type_name, decl] : p.model->vocabulary.types) {
        if (type_name == kIntType) continue;
        s.domains[type_name] = decl.domain;
    }
    for (std::size_t i = 0; i < p.cells.size(); ++i) {
        const Cell& cell = p.cells[i];
        const Value& v = cell.domain[assignment[i]];
        if (cell.is_relation) {
            s.rels[cell.symbol]; // symbol is interpreted even when empty
            if (v.as_bool()) s.rels[cell.symbol].insert(cell.args);
        } else {
            s.funcs[cell.symbol][cell.args] = v;
        }
    }
    return s;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Grounding
// ---------------------------------------------------------------------------

namespace detail {

class Grounder {
public:
    Grounder(const CompiledModel& model, GroundProblem& problem, const EngineLimits& limits)
        : model_(model), problem_(problem), limits_(limits) {}

    GFormulaPtr ground_formula(const Formula& f) {
        bump();
        switch (f.kind) {
            case Formula::Kind::Truth: return GFormula::mk_const(f.truth);
            case Formula::Kind::Pred: {
                std::vector<GTermPtr> args;
                bool all_const = true;
                for (const auto& a : f.args) {
                    args.push_back(ground_term(*a));
                    all_const &= args.back()->kind == GTerm::Kind::Const;
                }
                if (all_const) {
                    std::vector<Value> vals;
                    for (const auto& a : args) {
                        if (a->constant.is_null()) return GFormula::mk_const(false);
                        vals.push_back(a->constant);
                    }
                    auto rit = model_.data.rels.find(f.symbol);
                    if (rit != model_.data.rels.end())
                        return GFormula::mk_const(rit->second.count(vals) > 0);
                    int cell = problem_.find_cell(f.symbol, vals);
                    if (cell < 0)
                        throw Error(ErrorCode::EmptyDomain,
                                    "no ground cell for relation '" + f.symbol + "'");
                    return GFormula::mk_cell(cell);
                }
                return GFormula::mk_select(f.symbol, std::move(args));
            }
            case Formula::Kind::Cmp: {
                GTermPtr l = ground_term(*f.lhs);
                GTermPtr r = ground_term(*f.rhs);
                if (l->kind == GTerm::Kind::Const && r->kind == GTerm::Kind::Const)
                    return GFormula::mk_const(eval_cmp(f.cmp, l->constant, r->constant));
                return GFormula::mk_cmp(f.cmp, std::move(l), std::move(r));
            }
            case Formula::Kind::Not: return GFormula::mk_not(ground_formula(*f.child));
            case Formula::Kind::And: {
                std::vector<GFormulaPtr> children;
                for (const auto& c : f.children) {
                    auto g = ground_formula(*c);
                    if (g->kind == GFormula::Kind::Const && !g->truth)
                        return GFormula::mk_const(false);
                    children.push_back(std::move(g));
                }
                return GFormula::mk_and(std::move(children));
            }
            case Formula::Kind::Or: {
                std::vector<GFormulaPtr> children;
                for (const auto& c : f.children) {
                    auto g = ground_formula(*c);
                    if (g->kind == GFormula::Kind::Const && g->truth)
                        return GFormula::mk_const(true);
                    children.push_back(std::move(g));
                }
                return GFormula::mk_or(std::move(children));
            }
            case Formula::Kind::Implies: {
                auto a = ground_formula(*f.ante);
                if (a->kind == GFormula::Kind::Const)
                    return a->truth ? ground_formula(*f.cons) : GFormula::mk_const(true);
                auto c = ground_formula(*f.cons);
                if (c->kind == GFormula::Kind::Const && c->truth) return GFormula::mk_const(true);
                return GFormula::mk_or({GFormula::mk_not(std::move(a)), std::move(c)});
            }
            case Formula::Kind::Forall:
            case Formula::Kind::Exists: {
                bool conj = f.kind == Formula::Kind::Forall;
                std::vector<GFormulaPtr> parts;
                bool short_circuit = false;
                for_tuples(f.qvars, 0, [&] {
                    if (short_circuit) return;
                    auto g = ground_formula(*f.body);
                    if (g->kind == GFormula::Kind::Const) {
                        if (conj && !g->truth) short_circuit = true;
                        if (!conj && g->truth) short_circuit = true;
                        if (g->truth == conj) return; // absorbed
                    }
                    parts.push_back(std::move(g));
                });
                if (short_circuit) return GFormula::mk_const(!conj);
                return conj ? GFormula::mk_and(std::move(parts)) : GFormula::mk_or(std::move(parts));
            }
        }
        return GFormula::mk_const(false);
    }

    GTermPtr ground_term(const Term& t) {
        bump();
        switch (t.kind) {
            case Term::Kind::Var: {
                const Value* v = env_.find(t.var.name);
                if (!v)
                    throw Error(ErrorCode::MalformedExpression,
                                "internal: unbound variable '" + t.var.name + "' while grounding");
                return GTerm::mk_const(*v);
            }
            case Term::Kind::Lit: return GTerm::mk_const(t.lit);
            case Term::Kind::FuncApp: {
                std::vector<GTermPtr> args;
                bool all_const = true;
                for (const auto& a : t.args) {
                    args.push_back(ground_term(*a));
                    all_const &= args.back()->kind == GTerm::Kind::Const;
                }
                if (all_const) {
                    std::vector<Value> vals;
                    for (const auto& a : args) {
                        if (a->constant.is_null()) return GTerm::mk_const(Value::null_value());
                        vals.push_back(a->constant);
                    }
                    auto fit = model_.data.funcs.find(t.symbol);
                    if (fit != model_.data.funcs.end()) {
                        auto vit = fit->second.find(vals);
                        if (vit == fit->second.end())
                            throw Error(ErrorCode::IncompleteFunctionData,
                                        "no data value for '" + t.symbol + "'");
                        return GTerm::mk_const(vit->second);
                    }
                    int cell = problem_.find_cell(t.symbol, vals);
                    if (cell < 0)
                        throw Error(ErrorCode::EmptyDomain,
                                    "no ground cell for function '" + t.symbol + "'");
                    return GTerm::mk_cell(cell);
                }
                return GTerm::mk_select(t.symbol, std::move(args));
            }
            case Term::Kind::Arith: {
                GTermPtr l = ground_term(*t.lhs);
                GTermPtr r = ground_term(*t.rhs);
                if (l->kind == GTerm::Kind::Const && r->kind == GTerm::Kind::Const) {
                    GroundEvalContext ctx{&problem_, nullptr};
                    GTerm tmp;
                    tmp.kind = GTerm::Kind::Arith;
                    tmp.op = t.op;
                    tmp.lhs = l;
                    tmp.rhs = r;
                    return GTerm::mk_const(geval_term(tmp, ctx));
                }
                return GTerm::mk_arith(t.op, std::move(l), std::move(r));
            }
            case Term::Kind::Agg: {
                std::vector<std::pair<GFormulaPtr, GTermPtr>> branches;
                for (const auto& br : t.branches) {
                    for_tuples(t.bound, 0, [&] {
                        auto cond = ground_formula(*br.condition);
                        if (cond->kind == GFormula::Kind::Const && !cond->truth) return;
                        branches.emplace_back(std::move(cond), ground_term(*br.value));
                    });
                }
                // Fold when every contribution is static.
                bool all_const = true;
                for (const auto& [cond, value] : branches)
                    all_const &= cond->kind == GFormula::Kind::Const &&
                                 value->kind == GTerm::Kind::Const;
                if (all_const) {
                    GroundEvalContext ctx{&problem_, nullptr};
                    GTerm tmp;
                    tmp.kind = GTerm::Kind::Agg;
                    tmp.agg = t.agg;
                    tmp.branches = branches;
                    return GTerm::mk_const(geval_term(tmp, ctx));
                }
                return GTerm::mk_agg(t.agg, std::move(branches));
            }
            case Term::Kind::Card: {
                std::vector<std::pair<GFormulaPtr, GTermPtr>> branches;
                for_tuples(t.bound, 0, [&] {
                    auto cond = ground_formula(*t.cond);
                    if (cond->kind == GFormula::Kind::Const && !cond->truth) return;
                    branches.emplace_back(std::move(cond), GTerm::mk_const(Value::integer(1)));
                });
                bool all_const = true;
                for (const auto& [cond, value] : branches)
                    all_const &= cond->kind == GFormula::Kind::Const;
                if (all_const) {
                    long long n = static_cast<long long>(branches.size());
                    return GTerm::mk_const(Value::integer(n));
                }
                return GTerm::mk_agg(AggKind::Sum, std::move(branches));
            }
        }
        return GTerm::mk_const(Value::null_value());
    }

private:
    template <typename Fn>
    void for_tuples(const std::vector<TypedVar>& vars, std::size_t i, Fn&& fn) {
        if (i == vars.size()) {
            fn();
            return;
        }
        const TypeDecl& decl = model_.vocabulary.type(vars[i].type);
        for (const Value& v : decl.domain) {
            env_.push(vars[i].name, v);
            for_tuples(vars, i + 1, fn);
            env_.pop();
        }
    }

    void bump() {
        if (++problem_.instantiations > limits_.max_ground)
            throw Error(ErrorCode::DomainBlowup,
                        "grounding exceeded the cap of " + std::to_string(limits_.max_ground) +
                            " instantiations");
    }

    const CompiledModel& model_;
    GroundProblem& problem_;
    const EngineLimits& limits_;
    Env env_;
};

} // namespace detail

// Instantiates every sentence over the finite domains, folds data-fixed
// values, and splits top-level conjunctions into separate ground constraints.
inline GroundProblem ground(const CompiledModel& model, const EngineLimits& limits = {}) {
    GroundProblem problem;
    problem.model = &model;
    detail::build_cells(model, problem.cells, problem.cell_index);

    detail::Grounder grounder(model, problem, limits);
    for (std::size_t i = 0; i < model.theory.sentences.size(); ++i) {
        GFormulaPtr g = grounder.ground_formula(*model.theory.sentences[i]);
        Provenance origin = i < model.theory.provenance.size() ? model.theory.provenance[i]
                                                               : Provenance{};
        std::vector<GFormulaPtr> queue{g};
        while (!queue.empty()) {
            GFormulaPtr cur = queue.back();
            queue.pop_back();
            if (cur->kind == GFormula::Kind::Const) {
                if (!cur->truth) problem.trivially_false = true;
                continue;
            }
            if (cur->kind == GFormula::Kind::And) {
                for (const auto& c : cur->children) queue.push_back(c);
                continue;
            }
            GroundConstraint gc;
            gc.formula = cur;
            std::set<int> cells;
            detail::collect_cells(*cur, problem, cells);
            gc.cells.assign(cells.begin(), cells.end());
            gc.origin = origin;
            problem.constraints.push_back(std::move(gc));
        }
    }

    if (model.task.kind != Task::Kind::ModelExpand && model.task.objective)
        problem.objective = grounder.ground_term(*model.task.objective);
    return problem;
}

} // namespace cdmn

#endif
