#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cdmn/fo.hpp"

using namespace cdmn;

namespace {

// Independent brute-force evaluator: quantifiers and aggregates are expanded
// by explicit substitution, never by the library's bound-variable machinery.
long long brute_term(const TermPtr& t, const Structure& s, bool& is_null, Value& out);

bool brute_formula(const FormulaPtr& f, const Structure& s) {
    switch (f->kind) {
        case Formula::Kind::Truth: return f->truth;
        case Formula::Kind::Pred: {
            std::vector<Value> args;
            for (const auto& a : f->args) {
                bool n = false;
                Value v;
                brute_term(a, s, n, v);
                if (n) return false;
                args.push_back(v);
            }
            return s.rels.at(f->symbol).count(args) > 0;
        }
        case Formula::Kind::Cmp: {
            bool ln = false, rn = false;
            Value l, r;
            brute_term(f->lhs, s, ln, l);
            brute_term(f->rhs, s, rn, r);
            return eval_cmp(f->cmp, ln ? Value::null_value() : l, rn ? Value::null_value() : r);
        }
        case Formula::Kind::Not: return !brute_formula(f->child, s);
        case Formula::Kind::And:
            for (const auto& c : f->children)
                if (!brute_formula(c, s)) return false;
            return true;
        case Formula::Kind::Or:
            for (const auto& c : f->children)
                if (brute_formula(c, s)) return true;
            return false;
        case Formula::Kind::Implies:
            return !brute_formula(f->ante, s) || brute_formula(f->cons, s);
        case Formula::Kind::Forall:
        case Formula::Kind::Exists: {
            // Expand into an explicit conjunction/disjunction by substitution.
            std::vector<Substitution> subs{{}};
            for (const auto& v : f->qvars) {
                std::vector<Substitution> next;
                for (const auto& sub : subs)
                    for (const auto& val : s.domain(v.type)) {
                        Substitution s2 = sub;
                        s2[v.name] = val;
                        next.push_back(s2);
                    }
                subs = next;
            }
            bool conj = f->kind == Formula::Kind::Forall;
            for (const auto& sub : subs) {
                bool r = brute_formula(substitute(f->body, sub), s);
                if (conj && !r) return false;
                if (!conj && r) return true;
            }
            return conj;
        }
    }
    return false;
}

long long brute_term(const TermPtr& t, const Structure& s, bool& is_null, Value& out) {
    is_null = false;
    switch (t->kind) {
        case Term::Kind::Var:
            FAIL("brute evaluator met an unsubstituted variable");
            return 0;
        case Term::Kind::Lit:
            out = t->lit;
            is_null = out.is_null();
            return out.is_int() ? out.num : 0;
        case Term::Kind::FuncApp: {
            std::vector<Value> args;
            for (const auto& a : t->args) {
                bool n = false;
                Value v;
                brute_term(a, s, n, v);
                if (n) {
                    is_null = true;
                    out = Value::null_value();
                    return 0;
                }
                args.push_back(v);
            }
            out = s.funcs.at(t->symbol).at(args);
            is_null = out.is_null();
            return out.is_int() ? out.num : 0;
        }
        case Term::Kind::Arith: {
            bool ln = false, rn = false;
            Value l, r;
            long long a = brute_term(t->lhs, s, ln, l);
            long long b = brute_term(t->rhs, s, rn, r);
            if (ln || rn) {
                is_null = true;
                out = Value::null_value();
                return 0;
            }
            long long res = 0;
            switch (t->op) {
                case ArithOp::Add: res = a + b; break;
                case ArithOp::Sub: res = a - b; break;
                case ArithOp::Mul: res = a * b; break;
                case ArithOp::Div: res = a / b; break;
            }
            out = Value::integer(res);
            return res;
        }
        case Term::Kind::Agg: {
            std::vector<Substitution> subs{{}};
            for (const auto& v : t->bound) {
                std::vector<Substitution> next;
                for (const auto& sub : subs)
                    for (const auto& val : s.domain(v.type)) {
                        Substitution s2 = sub;
                        s2[v.name] = val;
                        next.push_back(s2);
                    }
                subs = next;
            }
            std::vector<long long> picked;
            for (const auto& br : t->branches)
                for (const auto& sub : subs) {
                    if (!brute_formula(substitute(br.condition, sub), s)) continue;
                    bool n = false;
                    Value v;
                    long long x = brute_term(substitute(br.value, sub), s, n, v);
                    if (n) {
                        is_null = true;
                        out = Value::null_value();
                        return 0;
                    }
                    picked.push_back(x);
                }
            long long res = 0;
            if (t->agg == AggKind::Sum) {
                for (long long x : picked) res += x;
            } else {
                REQUIRE(!picked.empty());
                res = picked[0];
                for (long long x : picked)
                    res = t->agg == AggKind::Min ? std::min(res, x) : std::max(res, x);
            }
            out = Value::integer(res);
            return res;
        }
        case Term::Kind::Card: {
            std::vector<Substitution> subs{{}};
            for (const auto& v : t->bound) {
                std::vector<Substitution> next;
                for (const auto& sub : subs)
                    for (const auto& val : s.domain(v.type)) {
                        Substitution s2 = sub;
                        s2[v.name] = val;
                        next.push_back(s2);
                    }
                subs = next;
            }
            long long count = 0;
            for (const auto& sub : subs)
                if (brute_formula(substitute(t->cond, sub), s)) ++count;
            out = Value::integer(count);
            return count;
        }
    }
    return 0;
}

Value eval_closed(const TermPtr& t, const Structure& s) {
    Env env;
    return eval_term(*t, s, env);
}

} // namespace

TEST_CASE("eval_term basics") {
    Structure s;
    s.domains["Item"] = {Value::element("a"), Value::element("b")};
    s.funcs["Price"] = {{{Value::element("a")}, Value::integer(3)},
                        {{Value::element("b")}, Value::integer(4)}};
    s.rels["InBasket"] = {{Value::element("a")}};

    SECTION("sum over one-element basket") {
        TypedVar item{"x", "Item"};
        auto agg = Term::mk_agg(
            AggKind::Sum, {item},
            {{Formula::mk_pred("InBasket", {Term::mk_var(item)}),
              Term::mk_func("Price", {Term::mk_var(item)})}});
        REQUIRE(eval_closed(agg, s) == Value::integer(3));
    }
    SECTION("cardinality of a type") {
        Structure s5;
        s5.domains["Doctor"] = {Value::element("d1"), Value::element("d2"), Value::element("d3"),
                                Value::element("d4"), Value::element("d5")};
        auto card = Term::mk_card({TypedVar{"x", "Doctor"}}, Formula::mk_truth(true));
        REQUIRE(eval_closed(card, s5) == Value::integer(5));
    }
    SECTION("division by zero") {
        auto bad = Term::mk_arith(ArithOp::Div, Term::mk_int(7), Term::mk_int(0));
        try {
            eval_closed(bad, s);
            FAIL("expected DivisionByZero");
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::DivisionByZero);
        }
    }
    SECTION("inexact division") {
        auto bad = Term::mk_arith(ArithOp::Div, Term::mk_int(7), Term::mk_int(2));
        try {
            eval_closed(bad, s);
            FAIL("expected InexactDivision");
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::InexactDivision);
        }
        auto good = Term::mk_arith(ArithOp::Div, Term::mk_int(8), Term::mk_int(2));
        REQUIRE(eval_closed(good, s) == Value::integer(4));
    }
    SECTION("null propagates through arithmetic and function application") {
        auto n = Term::mk_lit(Value::null_value());
        REQUIRE(eval_closed(Term::mk_arith(ArithOp::Add, n, Term::mk_int(3)), s).is_null());
        REQUIRE(eval_closed(Term::mk_func("Price", {n}), s).is_null());
    }
    SECTION("min/max of empty set is an error, empty sum is 0") {
        auto empty_sum = Term::mk_agg(AggKind::Sum, {TypedVar{"x", "Item"}},
                                      {{Formula::mk_truth(false), Term::mk_int(1)}});
        REQUIRE(eval_closed(empty_sum, s) == Value::integer(0));
        auto empty_min = Term::mk_agg(AggKind::Min, {TypedVar{"x", "Item"}},
                                      {{Formula::mk_truth(false), Term::mk_int(1)}});
        try {
            eval_closed(empty_min, s);
            FAIL("expected MinMaxOfEmptySet");
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::MinMaxOfEmptySet);
        }
    }
    SECTION("aggregate with a null contribution is null") {
        Structure sn = s;
        sn.funcs["Price"][{Value::element("a")}] = Value::null_value();
        TypedVar item{"x", "Item"};
        auto agg = Term::mk_agg(
            AggKind::Sum, {item},
            {{Formula::mk_pred("InBasket", {Term::mk_var(item)}),
              Term::mk_func("Price", {Term::mk_var(item)})}});
        REQUIRE(eval_closed(agg, sn).is_null());
    }
}

TEST_CASE("eval_formula basics") {
    Structure s;
    s.domains["Doctor"] = {Value::element("d1"), Value::element("d2")};
    s.funcs["shifts"] = {{{Value::element("d1")}, Value::integer(1)},
                         {{Value::element("d2")}, Value::integer(1)}};

    SECTION("bounded universal holds") {
        TypedVar x{"x", "Doctor"};
        auto f = Formula::mk_forall(
            {x}, Formula::mk_cmp(CmpOp::Leq, Term::mk_func("shifts", {Term::mk_var(x)}),
                                 Term::mk_int(1)));
        REQUIRE(eval_sentence(f, s));
    }
    SECTION("vacuous implication") {
        auto f = Formula::mk_implies(Formula::mk_truth(false), Formula::mk_truth(false));
        REQUIRE(eval_sentence(f, s));
    }
    SECTION("predicate over a null argument is false") {
        Structure sp;
        sp.rels["P"] = {{Value::integer(0)}};
        auto f = Formula::mk_pred("P", {Term::mk_lit(Value::null_value())});
        REQUIRE(!eval_sentence(f, sp));
    }
}

// Comparison semantics over {null, 0, 1}, fixed by this module: equality
// holds only between null and itself; order comparisons with null are false.
TEST_CASE("null comparison truth table") {
    const Value N = Value::null_value(), Z = Value::integer(0), O = Value::integer(1);
    struct Row {
        CmpOp op;
        Value l, r;
        bool expect;
    };
    const Row table[] = {
        {CmpOp::Eq, N, N, true},   {CmpOp::Eq, N, Z, false},  {CmpOp::Eq, N, O, false},
        {CmpOp::Eq, Z, N, false},  {CmpOp::Eq, O, N, false},  {CmpOp::Eq, Z, Z, true},
        {CmpOp::Eq, Z, O, false},  {CmpOp::Eq, O, Z, false},  {CmpOp::Eq, O, O, true},
        {CmpOp::Neq, N, N, false}, {CmpOp::Neq, N, Z, true},  {CmpOp::Neq, Z, N, true},
        {CmpOp::Neq, Z, O, true},  {CmpOp::Neq, Z, Z, false},
        {CmpOp::Lt, N, N, false},  {CmpOp::Lt, N, Z, false},  {CmpOp::Lt, Z, N, false},
        {CmpOp::Lt, Z, O, true},   {CmpOp::Lt, O, Z, false},  {CmpOp::Lt, Z, Z, false},
        {CmpOp::Leq, N, O, false}, {CmpOp::Leq, O, N, false}, {CmpOp::Leq, Z, Z, true},
        {CmpOp::Leq, Z, O, true},  {CmpOp::Leq, O, Z, false},
        {CmpOp::Gt, N, Z, false},  {CmpOp::Gt, O, N, false},  {CmpOp::Gt, O, Z, true},
        {CmpOp::Gt, Z, O, false},
        {CmpOp::Geq, N, N, false}, {CmpOp::Geq, Z, N, false}, {CmpOp::Geq, O, Z, true},
        {CmpOp::Geq, Z, O, false}, {CmpOp::Geq, Z, Z, true},
    };
    for (const Row& row : table) {
        INFO(row.l.str() << " op " << row.r.str());
        REQUIRE(eval_cmp(row.op, row.l, row.r) == row.expect);
    }
}

TEST_CASE("free variables") {
    TypedVar x{"x", "T"}, y{"y", "T"};
    SECTION("quantifier binds") {
        auto f = Formula::mk_forall({x}, Formula::mk_pred("P", {Term::mk_var(x), Term::mk_var(y)}));
        auto fv = free_vars(*f);
        REQUIRE(fv == std::set<TypedVar>{y});
    }
    SECTION("aggregate binds its tuple variables") {
        auto agg = Term::mk_agg(AggKind::Sum, {y},
                                {{Formula::mk_pred("Q", {Term::mk_var(x), Term::mk_var(y)}),
                                  Term::mk_func("f", {Term::mk_var(y)})}});
        auto fv = free_vars(*agg);
        REQUIRE(fv == std::set<TypedVar>{x});
    }
    SECTION("closed sentence has no free variables") {
        auto f = Formula::mk_forall(
            {x, y}, Formula::mk_pred("P", {Term::mk_var(x), Term::mk_var(y)}));
        REQUIRE(free_vars(*f).empty());
    }
}

TEST_CASE("alpha equivalence") {
    TypedVar x{"x", "T"}, y{"y", "T"}, z{"z", "U"};
    auto px = Formula::mk_forall({x}, Formula::mk_pred("P", {Term::mk_var(x)}));
    auto py = Formula::mk_forall({y}, Formula::mk_pred("P", {Term::mk_var(y)}));
    auto pz = Formula::mk_forall({z}, Formula::mk_pred("P", {Term::mk_var(z)}));
    REQUIRE(alpha_equal(*px, *py));
    REQUIRE(!alpha_equal(*px, *pz)); // type differs

    // Renaming must be bijective: ∀x,y: P(x,y) vs ∀x,y: P(x,x).
    auto pxy = Formula::mk_forall({x, y}, Formula::mk_pred("P", {Term::mk_var(x), Term::mk_var(y)}));
    auto pxx = Formula::mk_forall({x, y}, Formula::mk_pred("P", {Term::mk_var(x), Term::mk_var(x)}));
    REQUIRE(!alpha_equal(*pxy, *pxx));
}

TEST_CASE("evaluation is invariant under alpha renaming and domain order") {
    Structure s;
    s.domains["T"] = {Value::element("a"), Value::element("b"), Value::element("c")};
    s.funcs["f"] = {{{Value::element("a")}, Value::integer(2)},
                    {{Value::element("b")}, Value::integer(5)},
                    {{Value::element("c")}, Value::integer(1)}};
    s.rels["P"] = {{Value::element("a")}, {Value::element("c")}};

    TypedVar x{"x", "T"}, y{"fresh", "T"};
    auto sum_x = Term::mk_agg(AggKind::Sum, {x},
                              {{Formula::mk_pred("P", {Term::mk_var(x)}),
                                Term::mk_func("f", {Term::mk_var(x)})}});
    auto sum_y = Term::mk_agg(AggKind::Sum, {y},
                              {{Formula::mk_pred("P", {Term::mk_var(y)}),
                                Term::mk_func("f", {Term::mk_var(y)})}});
    Env env;
    REQUIRE(eval_term(*sum_x, s, env) == eval_term(*sum_y, s, env));
    REQUIRE(eval_term(*sum_x, s, env) == Value::integer(3));

    Structure permuted = s;
    permuted.domains["T"] = {Value::element("c"), Value::element("b"), Value::element("a")};
    REQUIRE(eval_term(*sum_x, permuted, env) == eval_term(*sum_x, s, env));
}

namespace {

// Random closed formulas over a small vocabulary; compare the evaluator
// against the substitution-expansion oracle.
struct Gen {
    std::mt19937 rng;
    Structure s;
    std::vector<TypedVar> scope; // in-scope T-variables
    int fresh = 0;

    explicit Gen(unsigned seed) : rng(seed) {
        std::uniform_int_distribution<int> dsize(1, 3);
        int n = dsize(rng);
        std::vector<Value> dom;
        for (int i = 0; i < n; ++i) dom.push_back(Value::element("e" + std::to_string(i)));
        s.domains["T"] = dom;
        s.domains["N"] = {Value::integer(0), Value::integer(1), Value::integer(2)};
        std::uniform_int_distribution<int> dint(0, 2);
        std::uniform_int_distribution<int> dbool(0, 1);
        for (const auto& e : dom) {
            s.funcs["g"][{e}] = Value::integer(dint(rng));
            if (dbool(rng)) s.rels["P"].insert({e});
            else s.rels["P"];
        }
        s.rels["P"]; // interpreted even if empty
        s.funcs["c"][{}] = Value::integer(dint(rng));
        if (dbool(rng)) s.rels["q"].insert({});
        else s.rels["q"];
    }

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    TermPtr elem_term() {
        if (!scope.empty() && pick(2) == 0) return Term::mk_var(scope[pick((int)scope.size())]);
        const auto& dom = s.domains["T"];
        return Term::mk_lit(dom[pick((int)dom.size())]);
    }

    TermPtr num_term(int depth) {
        switch (depth <= 0 ? pick(3) : pick(6)) {
            case 0: return Term::mk_int(pick(3));
            case 1: return Term::mk_func("c", {});
            case 2: return Term::mk_func("g", {elem_term()});
            case 3: {
                ArithOp ops[] = {ArithOp::Add, ArithOp::Sub, ArithOp::Mul};
                return Term::mk_arith(ops[pick(3)], num_term(depth - 1), num_term(depth - 1));
            }
            case 4: {
                TypedVar v{"s" + std::to_string(fresh++), "T"};
                scope.push_back(v);
                auto cond = formula(depth - 1);
                auto val = num_term(depth - 1);
                scope.pop_back();
                return Term::mk_agg(AggKind::Sum, {v}, {{cond, val}});
            }
            default: {
                TypedVar v{"k" + std::to_string(fresh++), "T"};
                scope.push_back(v);
                auto cond = formula(depth - 1);
                scope.pop_back();
                return Term::mk_card({v}, cond);
            }
        }
    }

    FormulaPtr formula(int depth) {
        if (depth <= 0) {
            switch (pick(4)) {
                case 0: return Formula::mk_pred("P", {elem_term()});
                case 1: return Formula::mk_pred("q", {});
                case 2: return Formula::mk_truth(pick(2) == 0);
                default: {
                    CmpOp ops[] = {CmpOp::Eq,  CmpOp::Neq, CmpOp::Lt,
                                   CmpOp::Leq, CmpOp::Gt,  CmpOp::Geq};
                    return Formula::mk_cmp(ops[pick(6)], num_term(0), num_term(0));
                }
            }
        }
        switch (pick(7)) {
            case 0: return Formula::mk_not(formula(depth - 1));
            case 1: return Formula::mk_and({formula(depth - 1), formula(depth - 1)});
            case 2: return Formula::mk_or({formula(depth - 1), formula(depth - 1)});
            case 3: return Formula::mk_implies(formula(depth - 1), formula(depth - 1));
            case 4: {
                CmpOp ops[] = {CmpOp::Eq, CmpOp::Neq, CmpOp::Lt, CmpOp::Leq, CmpOp::Gt, CmpOp::Geq};
                return Formula::mk_cmp(ops[pick(6)], num_term(depth - 1), num_term(depth - 1));
            }
            case 5: {
                auto a = elem_term();
                auto b = elem_term();
                return Formula::mk_cmp(pick(2) ? CmpOp::Eq : CmpOp::Neq, a, b);
            }
            default: {
                TypedVar v{"v" + std::to_string(fresh++), "T"};
                scope.push_back(v);
                auto body = formula(depth - 1);
                scope.pop_back();
                return pick(2) ? Formula::mk_forall({v}, body) : Formula::mk_exists({v}, body);
            }
        }
    }
};

} // namespace

TEST_CASE("evaluator agrees with substitution-expansion oracle on 500 random cases") {
    for (unsigned seed = 0; seed < 500; ++seed) {
        Gen gen(seed);
        auto f = gen.formula(3);
        REQUIRE(free_vars(*f).empty());
        INFO("seed " << seed << ": " << to_string(*f));
        REQUIRE(eval_sentence(f, gen.s) == brute_formula(f, gen.s));
    }
}

TEST_CASE("printer emits the debug logic syntax") {
    TypedVar x{"x", "Doctor"}, y{"y", "Day"};
    auto f = Formula::mk_forall(
        {x, y},
        Formula::mk_cmp(CmpOp::Leq,
                        Term::mk_func("nb_shifts_of_Doctor_on_Day", {Term::mk_var(x), Term::mk_var(y)}),
                        Term::mk_int(1)));
    REQUIRE(to_string(*f) == "∀x[Doctor], y[Day]: nb_shifts_of_Doctor_on_Day(x, y) ≤ 1");
}
