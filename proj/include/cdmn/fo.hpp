#ifndef CDMN_FO_HPP
#define CDMN_FO_HPP

#include <algorithm>
#include <cassert>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cdmn/error.hpp"

namespace cdmn {

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

// A domain value: an integer, a named domain element, a truth value (for
// relation tuples during search), or the reserved null element forced by
// incomplete decision tables.
struct Value {
    enum class Kind : unsigned char { Null, Bool, Int, Elem };

    Kind kind = Kind::Null;
    long long num = 0;  // Bool (0/1) or Int payload
    std::string elem;   // Elem payload

    static Value null_value() { return Value{}; }
    static Value boolean(bool b) { return Value{Kind::Bool, b ? 1 : 0, {}}; }
    static Value integer(long long n) { return Value{Kind::Int, n, {}}; }
    static Value element(std::string name) { return Value{Kind::Elem, 0, std::move(name)}; }

    bool is_null() const { return kind == Kind::Null; }
    bool is_bool() const { return kind == Kind::Bool; }
    bool is_int() const { return kind == Kind::Int; }
    bool is_elem() const { return kind == Kind::Elem; }
    bool as_bool() const { return num != 0; }

    std::string str() const {
        switch (kind) {
            case Kind::Null: return "null";
            case Kind::Bool: return num ? "true" : "false";
            case Kind::Int: return std::to_string(num);
            case Kind::Elem: return elem;
        }
        return "?";
    }

    friend bool operator==(const Value& a, const Value& b) {
        return a.kind == b.kind && a.num == b.num && a.elem == b.elem;
    }
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
    friend bool operator<(const Value& a, const Value& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.num != b.num) return a.num < b.num;
        return a.elem < b.elem;
    }
};

// ---------------------------------------------------------------------------
// Terms and formulas
// ---------------------------------------------------------------------------

struct TypedVar {
    std::string name;
    std::string type;

    friend bool operator==(const TypedVar& a, const TypedVar& b) {
        return a.name == b.name && a.type == b.type;
    }
    friend bool operator<(const TypedVar& a, const TypedVar& b) {
        return a.name != b.name ? a.name < b.name : a.type < b.type;
    }
};

enum class ArithOp { Add, Sub, Mul, Div };
enum class AggKind { Sum, Min, Max };
enum class CmpOp { Eq, Neq, Lt, Leq, Gt, Geq };

inline CmpOp negate_cmp(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return CmpOp::Neq;
        case CmpOp::Neq: return CmpOp::Eq;
        case CmpOp::Lt: return CmpOp::Geq;
        case CmpOp::Leq: return CmpOp::Gt;
        case CmpOp::Gt: return CmpOp::Leq;
        case CmpOp::Geq: return CmpOp::Lt;
    }
    return CmpOp::Eq;
}

struct Term;
struct Formula;
using TermPtr = std::shared_ptr<const Term>;
using FormulaPtr = std::shared_ptr<const Formula>;

// One (condition, value) branch of an aggregate. A C+ table contributes one
// branch per row; the aggregate combines contributions of all branches over
// all bound-variable tuples.
struct AggBranch {
    FormulaPtr condition;
    TermPtr value;
};

struct Term {
    enum class Kind { Var, Lit, FuncApp, Arith, Agg, Card };

    Kind kind;
    TypedVar var;                    // Var
    Value lit;                       // Lit
    std::string symbol;              // FuncApp
    std::vector<TermPtr> args;       // FuncApp
    ArithOp op = ArithOp::Add;       // Arith
    TermPtr lhs, rhs;                // Arith
    AggKind agg = AggKind::Sum;      // Agg
    std::vector<TypedVar> bound;     // Agg, Card
    std::vector<AggBranch> branches; // Agg
    FormulaPtr cond;                 // Card

    static TermPtr mk_var(TypedVar v) {
        auto t = std::make_shared<Term>();
        t->kind = Kind::Var;
        t->var = std::move(v);
        return t;
    }
    static TermPtr mk_lit(Value v) {
        auto t = std::make_shared<Term>();
        t->kind = Kind::Lit;
        t->lit = std::move(v);
        return t;
    }
    static TermPtr mk_int(long long n) { return mk_lit(Value::integer(n)); }
    static TermPtr mk_elem(std::string e) { return mk_lit(Value::element(std::move(e))); }
    static TermPtr mk_func(std::string symbol, std::vector<TermPtr> args) {
        auto t = std::make_shared<Term>();
        t->kind = Kind::FuncApp;
        t->symbol = std::move(symbol);
        t->args = std::move(args);
        return t;
    }
    static TermPtr mk_arith(ArithOp op, TermPtr l, TermPtr r) {
        auto t = std::make_shared<Term>();
        t->kind = Kind::Arith;
        t->op = op;
        t->lhs = std::move(l);
        t->rhs = std::move(r);
        return t;
    }
    static TermPtr mk_agg(AggKind kind, std::vector<TypedVar> bound,
                          std::vector<AggBranch> branches) {
        auto t = std::make_shared<Term>();
        t->kind = Kind::Agg;
        t->agg = kind;
        t->bound = std::move(bound);
        t->branches = std::move(branches);
        return t;
    }
    static TermPtr mk_card(std::vector<TypedVar> bound, FormulaPtr cond);
};

struct Formula {
    enum class Kind { Truth, Pred, Cmp, Not, And, Or, Implies, Forall, Exists };

    Kind kind;
    bool truth = false;                // Truth
    std::string symbol;                // Pred
    std::vector<TermPtr> args;         // Pred
    CmpOp cmp = CmpOp::Eq;             // Cmp
    TermPtr lhs, rhs;                  // Cmp
    FormulaPtr child;                  // Not
    std::vector<FormulaPtr> children;  // And, Or
    FormulaPtr ante, cons;             // Implies
    std::vector<TypedVar> qvars;       // Forall, Exists
    FormulaPtr body;                   // Forall, Exists

    static FormulaPtr mk_truth(bool b) {
        auto f = std::make_shared<Formula>();
        f->kind = Kind::Truth;
        f->truth = b;
        return f;
    }
    static FormulaPtr mk_pred(std::string symbol, std::vector<TermPtr> args) {
        auto f = std::make_shared<Formula>();
        f->kind = Kind::Pred;
        f->symbol = std::move(symbol);
        f->args = std::move(args);
        return f;
    }
    static FormulaPtr mk_cmp(CmpOp op, TermPtr l, TermPtr r) {
        auto f = std::make_shared<Formula>();
        f->kind = Kind::Cmp;
        f->cmp = op;
        f->lhs = std::move(l);
        f->rhs = std::move(r);
        return f;
    }
    static FormulaPtr mk_not(FormulaPtr g) {
        auto f = std::make_shared<Formula>();
        f->kind = Kind::Not;
        f->child = std::move(g);
        return f;
    }
    static FormulaPtr mk_and(std::vector<FormulaPtr> children) {
        auto f = std::make_shared<Formula>();
        f->kind = Kind::And;
        f->children = std::move(children);
        return f;
    }
    static FormulaPtr mk_or(std::vector<FormulaPtr> children) {
        auto f = std::make_shared<Formula>();
        f->kind = Kind::Or;
        f->children = std::move(children);
        return f;
    }
    static FormulaPtr mk_implies(FormulaPtr a, FormulaPtr c) {
        auto f = std::make_shared<Formula>();
        f->kind = Kind::Implies;
        f->ante = std::move(a);
        f->cons = std::move(c);
        return f;
    }
    static FormulaPtr mk_forall(std::vector<TypedVar> vars, FormulaPtr body) {
        auto f = std::make_shared<Formula>();
        f->kind = Kind::Forall;
        f->qvars = std::move(vars);
        f->body = std::move(body);
        return f;
    }
    static FormulaPtr mk_exists(std::vector<TypedVar> vars, FormulaPtr body) {
        auto f = std::make_shared<Formula>();
        f->kind = Kind::Exists;
        f->qvars = std::move(vars);
        f->body = std::move(body);
        return f;
    }
};

inline TermPtr Term::mk_card(std::vector<TypedVar> bound, FormulaPtr cond) {
    auto t = std::make_shared<Term>();
    t->kind = Kind::Card;
    t->bound = std::move(bound);
    t->cond = std::move(cond);
    return t;
}

// ---------------------------------------------------------------------------
// Theory and structure
// ---------------------------------------------------------------------------

struct Provenance {
    std::string table;
    int row_begin = 0; // 1-based workbook rows; 0 = whole table
    int row_end = 0;
};

struct Theory {
    std::vector<FormulaPtr> sentences;
    std::vector<Provenance> provenance; // parallel to sentences
};

// Finite domains plus (partial) interpretations. Constants are 0-ary
// functions (keyed by the empty tuple); propositions are 0-ary relations.
// A symbol is interpreted iff its map entry exists.
struct Structure {
    std::map<std::string, std::vector<Value>> domains;
    std::map<std::string, std::map<std::vector<Value>, Value>> funcs;
    std::map<std::string, std::set<std::vector<Value>>> rels;

    const std::vector<Value>& domain(const std::string& type) const {
        auto it = domains.find(type);
        if (it == domains.end())
            throw Error(ErrorCode::EmptyDomain, "type '" + type + "' has no domain");
        return it->second;
    }

    bool interprets_func(const std::string& s) const { return funcs.count(s) > 0; }
    bool interprets_rel(const std::string& s) const { return rels.count(s) > 0; }

    void set_constant(const std::string& s, Value v) { funcs[s][{}] = std::move(v); }
    void set_prop(const std::string& s, bool b) {
        rels[s].clear();
        if (b) rels[s].insert({});
        else rels[s]; // interpreted, empty
    }

    friend bool operator==(const Structure& a, const Structure& b) {
        return a.domains == b.domains && a.funcs == b.funcs && a.rels == b.rels;
    }
};

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

// Variable environment with lexical scoping.
class Env {
public:
    void push(const std::string& name, Value v) { frames_.emplace_back(name, std::move(v)); }
    void pop(std::size_t n = 1) { frames_.resize(frames_.size() - n); }

    const Value* find(const std::string& name) const {
        for (auto it = frames_.rbegin(); it != frames_.rend(); ++it)
            if (it->first == name) return &it->second;
        return nullptr;
    }

private:
    std::vector<std::pair<std::string, Value>> frames_;
};

inline Value eval_term(const Term& t, const Structure& s, Env& env);
inline bool eval_formula(const Formula& f, const Structure& s, Env& env);

namespace detail {

// Enumerates all tuples over the domains of `vars`, calling fn with the
// variables bound in env. Stops early when fn returns false.
template <typename Fn>
bool for_each_tuple(const std::vector<TypedVar>& vars, const Structure& s, Env& env, Fn&& fn,
                    std::size_t i = 0) {
    if (i == vars.size()) return fn();
    for (const Value& v : s.domain(vars[i].type)) {
        env.push(vars[i].name, v);
        bool keep_going = for_each_tuple(vars, s, env, fn, i + 1);
        env.pop();
        if (!keep_going) return false;
    }
    return true;
}

inline long long require_int(const Value& v, const char* what) {
    if (!v.is_int())
        throw Error(ErrorCode::TypeMismatch,
                    std::string(what) + " requires an integer, got '" + v.str() + "'");
    return v.num;
}

} // namespace detail

inline Value eval_term(const Term& t, const Structure& s, Env& env) {
    switch (t.kind) {
        case Term::Kind::Var: {
            const Value* v = env.find(t.var.name);
            if (!v)
                throw Error(ErrorCode::MalformedExpression,
                            "unbound variable '" + t.var.name + "' during evaluation");
            return *v;
        }
        case Term::Kind::Lit:
            return t.lit;
        case Term::Kind::FuncApp: {
            std::vector<Value> args;
            args.reserve(t.args.size());
            bool any_null = false;
            for (const auto& a : t.args) {
                args.push_back(eval_term(*a, s, env));
                any_null |= args.back().is_null();
            }
            if (any_null) return Value::null_value(); // strict null propagation
            auto fit = s.funcs.find(t.symbol);
            if (fit == s.funcs.end())
                throw Error(ErrorCode::MalformedExpression,
                            "symbol '" + t.symbol + "' is uninterpreted in this structure");
            auto vit = fit->second.find(args);
            if (vit == fit->second.end())
                throw Error(ErrorCode::MalformedExpression,
                            "function '" + t.symbol + "' has no value for the given tuple");
            return vit->second;
        }
        case Term::Kind::Arith: {
            Value l = eval_term(*t.lhs, s, env);
            Value r = eval_term(*t.rhs, s, env);
            if (l.is_null() || r.is_null()) return Value::null_value();
            long long a = detail::require_int(l, "arithmetic");
            long long b = detail::require_int(r, "arithmetic");
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
        case Term::Kind::Agg: {
            bool any = false;
            bool saw_null = false;
            long long acc = 0;
            for (const auto& br : t.branches) {
                detail::for_each_tuple(t.bound, s, env, [&] {
                    if (!eval_formula(*br.condition, s, env)) return true;
                    Value v = eval_term(*br.value, s, env);
                    if (v.is_null()) {
                        saw_null = true;
                        return true;
                    }
                    long long n = detail::require_int(v, "aggregate");
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
                    return true;
                });
            }
            if (saw_null) return Value::null_value();
            if (!any) {
                if (t.agg == AggKind::Sum) return Value::integer(0);
                throw Error(ErrorCode::MinMaxOfEmptySet,
                            "min/max aggregate over an empty satisfying set");
            }
            return Value::integer(acc);
        }
        case Term::Kind::Card: {
            long long count = 0;
            detail::for_each_tuple(t.bound, s, env, [&] {
                if (eval_formula(*t.cond, s, env)) ++count;
                return true;
            });
            return Value::integer(count);
        }
    }
    return Value::null_value();
}

// Comparison semantics with null: equality holds only between null and
// itself; order comparisons involving null are false.
inline bool eval_cmp(CmpOp op, const Value& l, const Value& r) {
    if (op == CmpOp::Eq || op == CmpOp::Neq) {
        bool eq;
        if (l.is_null() || r.is_null()) {
            eq = l.is_null() && r.is_null();
        } else {
            if (l.kind != r.kind)
                throw Error(ErrorCode::TypeMismatch,
                            "cannot compare '" + l.str() + "' with '" + r.str() + "'");
            eq = l == r;
        }
        return op == CmpOp::Eq ? eq : !eq;
    }
    if (l.is_null() || r.is_null()) return false;
    long long a = detail::require_int(l, "comparison");
    long long b = detail::require_int(r, "comparison");
    switch (op) {
        case CmpOp::Lt: return a < b;
        case CmpOp::Leq: return a <= b;
        case CmpOp::Gt: return a > b;
        case CmpOp::Geq: return a >= b;
        default: return false;
    }
}

inline bool eval_formula(const Formula& f, const Structure& s, Env& env) {
    switch (f.kind) {
        case Formula::Kind::Truth:
            return f.truth;
        case Formula::Kind::Pred: {
            std::vector<Value> args;
            args.reserve(f.args.size());
            for (const auto& a : f.args) {
                args.push_back(eval_term(*a, s, env));
                if (args.back().is_null()) return false; // null belongs to no relation
            }
            auto it = s.rels.find(f.symbol);
            if (it == s.rels.end())
                throw Error(ErrorCode::MalformedExpression,
                            "relation '" + f.symbol + "' is uninterpreted in this structure");
            return it->second.count(args) > 0;
        }
        case Formula::Kind::Cmp:
            return eval_cmp(f.cmp, eval_term(*f.lhs, s, env), eval_term(*f.rhs, s, env));
        case Formula::Kind::Not:
            return !eval_formula(*f.child, s, env);
        case Formula::Kind::And:
            for (const auto& c : f.children)
                if (!eval_formula(*c, s, env)) return false;
            return true;
        case Formula::Kind::Or:
            for (const auto& c : f.children)
                if (eval_formula(*c, s, env)) return true;
            return false;
        case Formula::Kind::Implies:
            return !eval_formula(*f.ante, s, env) || eval_formula(*f.cons, s, env);
        case Formula::Kind::Forall: {
            bool holds = true;
            detail::for_each_tuple(f.qvars, s, env, [&] {
                if (!eval_formula(*f.body, s, env)) {
                    holds = false;
                    return false;
                }
                return true;
            });
            return holds;
        }
        case Formula::Kind::Exists: {
            bool holds = false;
            detail::for_each_tuple(f.qvars, s, env, [&] {
                if (eval_formula(*f.body, s, env)) {
                    holds = true;
                    return false;
                }
                return true;
            });
            return holds;
        }
    }
    return false;
}

inline bool eval_sentence(const FormulaPtr& f, const Structure& s) {
    Env env;
    return eval_formula(*f, s, env);
}

// ---------------------------------------------------------------------------
// Free variables
// ---------------------------------------------------------------------------

namespace detail {

inline void free_vars_term(const Term& t, std::vector<std::string>& bound,
                           std::set<TypedVar>& out);

inline void free_vars_formula(const Formula& f, std::vector<std::string>& bound,
                              std::set<TypedVar>& out) {
    switch (f.kind) {
        case Formula::Kind::Truth: return;
        case Formula::Kind::Pred:
            for (const auto& a : f.args) free_vars_term(*a, bound, out);
            return;
        case Formula::Kind::Cmp:
            free_vars_term(*f.lhs, bound, out);
            free_vars_term(*f.rhs, bound, out);
            return;
        case Formula::Kind::Not: free_vars_formula(*f.child, bound, out); return;
        case Formula::Kind::And:
        case Formula::Kind::Or:
            for (const auto& c : f.children) free_vars_formula(*c, bound, out);
            return;
        case Formula::Kind::Implies:
            free_vars_formula(*f.ante, bound, out);
            free_vars_formula(*f.cons, bound, out);
            return;
        case Formula::Kind::Forall:
        case Formula::Kind::Exists: {
            std::size_t n = bound.size();
            for (const auto& v : f.qvars) bound.push_back(v.name);
            free_vars_formula(*f.body, bound, out);
            bound.resize(n);
            return;
        }
    }
}

inline void free_vars_term(const Term& t, std::vector<std::string>& bound,
                           std::set<TypedVar>& out) {
    switch (t.kind) {
        case Term::Kind::Var:
            if (std::find(bound.begin(), bound.end(), t.var.name) == bound.end())
                out.insert(t.var);
            return;
        case Term::Kind::Lit: return;
        case Term::Kind::FuncApp:
            for (const auto& a : t.args) free_vars_term(*a, bound, out);
            return;
        case Term::Kind::Arith:
            free_vars_term(*t.lhs, bound, out);
            free_vars_term(*t.rhs, bound, out);
            return;
        case Term::Kind::Agg: {
            std::size_t n = bound.size();
            for (const auto& v : t.bound) bound.push_back(v.name);
            for (const auto& br : t.branches) {
                free_vars_formula(*br.condition, bound, out);
                free_vars_term(*br.value, bound, out);
            }
            bound.resize(n);
            return;
        }
        case Term::Kind::Card: {
            std::size_t n = bound.size();
            for (const auto& v : t.bound) bound.push_back(v.name);
            free_vars_formula(*t.cond, bound, out);
            bound.resize(n);
            return;
        }
    }
}

} // namespace detail

inline std::set<TypedVar> free_vars(const Formula& f) {
    std::set<TypedVar> out;
    std::vector<std::string> bound;
    detail::free_vars_formula(f, bound, out);
    return out;
}

inline std::set<TypedVar> free_vars(const Term& t) {
    std::set<TypedVar> out;
    std::vector<std::string> bound;
    detail::free_vars_term(t, bound, out);
    return out;
}

// ---------------------------------------------------------------------------
// Substitution (variable -> literal value); used by grounding-style
// expansions and by brute-force test evaluators.
// ---------------------------------------------------------------------------

using Substitution = std::map<std::string, Value>;

inline TermPtr substitute(const TermPtr& t, const Substitution& sub);

inline FormulaPtr substitute(const FormulaPtr& f, const Substitution& sub) {
    switch (f->kind) {
        case Formula::Kind::Truth: return f;
        case Formula::Kind::Pred: {
            std::vector<TermPtr> args;
            for (const auto& a : f->args) args.push_back(substitute(a, sub));
            return Formula::mk_pred(f->symbol, std::move(args));
        }
        case Formula::Kind::Cmp:
            return Formula::mk_cmp(f->cmp, substitute(f->lhs, sub), substitute(f->rhs, sub));
        case Formula::Kind::Not: return Formula::mk_not(substitute(f->child, sub));
        case Formula::Kind::And:
        case Formula::Kind::Or: {
            std::vector<FormulaPtr> children;
            for (const auto& c : f->children) children.push_back(substitute(c, sub));
            return f->kind == Formula::Kind::And ? Formula::mk_and(std::move(children))
                                                 : Formula::mk_or(std::move(children));
        }
        case Formula::Kind::Implies:
            return Formula::mk_implies(substitute(f->ante, sub), substitute(f->cons, sub));
        case Formula::Kind::Forall:
        case Formula::Kind::Exists: {
            Substitution inner = sub;
            for (const auto& v : f->qvars) inner.erase(v.name);
            auto body = substitute(f->body, inner);
            return f->kind == Formula::Kind::Forall ? Formula::mk_forall(f->qvars, body)
                                                    : Formula::mk_exists(f->qvars, body);
        }
    }
    return f;
}

inline TermPtr substitute(const TermPtr& t, const Substitution& sub) {
    switch (t->kind) {
        case Term::Kind::Var: {
            auto it = sub.find(t->var.name);
            if (it == sub.end()) return t;
            return Term::mk_lit(it->second);
        }
        case Term::Kind::Lit: return t;
        case Term::Kind::FuncApp: {
            std::vector<TermPtr> args;
            for (const auto& a : t->args) args.push_back(substitute(a, sub));
            return Term::mk_func(t->symbol, std::move(args));
        }
        case Term::Kind::Arith:
            return Term::mk_arith(t->op, substitute(t->lhs, sub), substitute(t->rhs, sub));
        case Term::Kind::Agg: {
            Substitution inner = sub;
            for (const auto& v : t->bound) inner.erase(v.name);
            std::vector<AggBranch> branches;
            for (const auto& br : t->branches)
                branches.push_back({substitute(br.condition, inner), substitute(br.value, inner)});
            return Term::mk_agg(t->agg, t->bound, std::move(branches));
        }
        case Term::Kind::Card: {
            Substitution inner = sub;
            for (const auto& v : t->bound) inner.erase(v.name);
            return Term::mk_card(t->bound, substitute(t->cond, inner));
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Alpha-equivalence
// ---------------------------------------------------------------------------

namespace detail {

// Bijective renaming stack between bound variables of two formulas.
struct VarMap {
    std::vector<std::pair<std::string, std::string>> pairs;

    bool matches(const std::string& a, const std::string& b) const {
        for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
            if (it->first == a) return it->second == b;
            if (it->second == b) return false;
        }
        return a == b; // free variables must agree by name
    }
};

inline bool alpha_term(const Term& a, const Term& b, VarMap& vm);

inline bool alpha_formula(const Formula& a, const Formula& b, VarMap& vm) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Formula::Kind::Truth: return a.truth == b.truth;
        case Formula::Kind::Pred: {
            if (a.symbol != b.symbol || a.args.size() != b.args.size()) return false;
            for (std::size_t i = 0; i < a.args.size(); ++i)
                if (!alpha_term(*a.args[i], *b.args[i], vm)) return false;
            return true;
        }
        case Formula::Kind::Cmp:
            return a.cmp == b.cmp && alpha_term(*a.lhs, *b.lhs, vm) &&
                   alpha_term(*a.rhs, *b.rhs, vm);
        case Formula::Kind::Not: return alpha_formula(*a.child, *b.child, vm);
        case Formula::Kind::And:
        case Formula::Kind::Or: {
            if (a.children.size() != b.children.size()) return false;
            for (std::size_t i = 0; i < a.children.size(); ++i)
                if (!alpha_formula(*a.children[i], *b.children[i], vm)) return false;
            return true;
        }
        case Formula::Kind::Implies:
            return alpha_formula(*a.ante, *b.ante, vm) && alpha_formula(*a.cons, *b.cons, vm);
        case Formula::Kind::Forall:
        case Formula::Kind::Exists: {
            if (a.qvars.size() != b.qvars.size()) return false;
            std::size_t n = vm.pairs.size();
            for (std::size_t i = 0; i < a.qvars.size(); ++i) {
                if (a.qvars[i].type != b.qvars[i].type) return false;
                vm.pairs.emplace_back(a.qvars[i].name, b.qvars[i].name);
            }
            bool ok = alpha_formula(*a.body, *b.body, vm);
            vm.pairs.resize(n);
            return ok;
        }
    }
    return false;
}

inline bool alpha_term(const Term& a, const Term& b, VarMap& vm) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Term::Kind::Var:
            return a.var.type == b.var.type && vm.matches(a.var.name, b.var.name);
        case Term::Kind::Lit: return a.lit == b.lit;
        case Term::Kind::FuncApp: {
            if (a.symbol != b.symbol || a.args.size() != b.args.size()) return false;
            for (std::size_t i = 0; i < a.args.size(); ++i)
                if (!alpha_term(*a.args[i], *b.args[i], vm)) return false;
            return true;
        }
        case Term::Kind::Arith:
            return a.op == b.op && alpha_term(*a.lhs, *b.lhs, vm) && alpha_term(*a.rhs, *b.rhs, vm);
        case Term::Kind::Agg: {
            if (a.agg != b.agg || a.bound.size() != b.bound.size() ||
                a.branches.size() != b.branches.size())
                return false;
            std::size_t n = vm.pairs.size();
            for (std::size_t i = 0; i < a.bound.size(); ++i) {
                if (a.bound[i].type != b.bound[i].type) return false;
                vm.pairs.emplace_back(a.bound[i].name, b.bound[i].name);
            }
            bool ok = true;
            for (std::size_t i = 0; ok && i < a.branches.size(); ++i)
                ok = alpha_formula(*a.branches[i].condition, *b.branches[i].condition, vm) &&
                     alpha_term(*a.branches[i].value, *b.branches[i].value, vm);
            vm.pairs.resize(n);
            return ok;
        }
        case Term::Kind::Card: {
            if (a.bound.size() != b.bound.size()) return false;
            std::size_t n = vm.pairs.size();
            for (std::size_t i = 0; i < a.bound.size(); ++i) {
                if (a.bound[i].type != b.bound[i].type) return false;
                vm.pairs.emplace_back(a.bound[i].name, b.bound[i].name);
            }
            bool ok = alpha_formula(*a.cond, *b.cond, vm);
            vm.pairs.resize(n);
            return ok;
        }
    }
    return false;
}

} // namespace detail

inline bool alpha_equal(const Formula& a, const Formula& b) {
    detail::VarMap vm;
    return detail::alpha_formula(a, b, vm);
}

inline bool alpha_equal(const Term& a, const Term& b) {
    detail::VarMap vm;
    return detail::alpha_term(a, b, vm);
}

// ---------------------------------------------------------------------------
// Printing (debug logic syntax, also used by --emit-theory and snapshots)
// ---------------------------------------------------------------------------

inline std::string to_string(const Term& t);

inline std::string to_string(const Formula& f) {
    auto join = [](const std::vector<FormulaPtr>& fs, const char* sep) {
        std::string out;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (i) out += sep;
            out += to_string(*fs[i]);
        }
        return out;
    };
    switch (f.kind) {
        case Formula::Kind::Truth: return f.truth ? "true" : "false";
        case Formula::Kind::Pred: {
            if (f.args.empty()) return f.symbol;
            std::string out = f.symbol + "(";
            for (std::size_t i = 0; i < f.args.size(); ++i) {
                if (i) out += ", ";
                out += to_string(*f.args[i]);
            }
            return out + ")";
        }
        case Formula::Kind::Cmp: {
            const char* op = "=";
            switch (f.cmp) {
                case CmpOp::Eq: op = "="; break;
                case CmpOp::Neq: op = "≠"; break;
                case CmpOp::Lt: op = "<"; break;
                case CmpOp::Leq: op = "≤"; break;
                case CmpOp::Gt: op = ">"; break;
                case CmpOp::Geq: op = "≥"; break;
            }
            return to_string(*f.lhs) + " " + op + " " + to_string(*f.rhs);
        }
        case Formula::Kind::Not: return "¬(" + to_string(*f.child) + ")";
        case Formula::Kind::And:
            if (f.children.empty()) return "true";
            return "(" + join(f.children, " ∧ ") + ")";
        case Formula::Kind::Or:
            if (f.children.empty()) return "false";
            return "(" + join(f.children, " ∨ ") + ")";
        case Formula::Kind::Implies:
            return "(" + to_string(*f.ante) + " ⇒ " + to_string(*f.cons) + ")";
        case Formula::Kind::Forall:
        case Formula::Kind::Exists: {
            std::string out = f.kind == Formula::Kind::Forall ? "∀" : "∃";
            for (std::size_t i = 0; i < f.qvars.size(); ++i) {
                if (i) out += ", ";
                out += f.qvars[i].name + "[" + f.qvars[i].type + "]";
            }
            return out + ": " + to_string(*f.body);
        }
    }
    return "?";
}

inline std::string to_string(const Term& t) {
    switch (t.kind) {
        case Term::Kind::Var: return t.var.name;
        case Term::Kind::Lit: return t.lit.str();
        case Term::Kind::FuncApp: {
            if (t.args.empty()) return t.symbol;
            std::string out = t.symbol + "(";
            for (std::size_t i = 0; i < t.args.size(); ++i) {
                if (i) out += ", ";
                out += to_string(*t.args[i]);
            }
            return out + ")";
        }
        case Term::Kind::Arith: {
            const char* op = "+";
            switch (t.op) {
                case ArithOp::Add: op = "+"; break;
                case ArithOp::Sub: op = "-"; break;
                case ArithOp::Mul: op = "*"; break;
                case ArithOp::Div: op = "/"; break;
            }
            return "(" + to_string(*t.lhs) + " " + op + " " + to_string(*t.rhs) + ")";
        }
        case Term::Kind::Agg: {
            const char* name = t.agg == AggKind::Sum ? "sum"
                               : t.agg == AggKind::Min ? "min"
                                                       : "max";
            std::string binder = "(";
            for (std::size_t i = 0; i < t.bound.size(); ++i) {
                if (i) binder += ", ";
                binder += t.bound[i].name + "[" + t.bound[i].type + "]";
            }
            binder += ")";
            std::string out;
            for (std::size_t i = 0; i < t.branches.size(); ++i) {
                if (i) out += " + ";
                out += std::string(name) + "{" + binder + ": " +
                       to_string(*t.branches[i].condition) + ": " +
                       to_string(*t.branches[i].value) + "}";
            }
            if (t.branches.empty()) out = std::string(name) + "{" + binder + ": false: 0}";
            return t.branches.size() > 1 ? "(" + out + ")" : out;
        }
        case Term::Kind::Card: {
            std::string out = "#{";
            for (std::size_t i = 0; i < t.bound.size(); ++i) {
                if (i) out += ", ";
                out += t.bound[i].name + "[" + t.bound[i].type + "]";
            }
            return out + ": " + to_string(*t.cond) + "}";
        }
    }
    return "?";
}

inline std::string to_string(const Theory& th) {
    std::string out;
    for (const auto& s : th.sentences) out += to_string(*s) + "\n";
    return out;
}

} // namespace cdmn

#endif
