#ifndef CDMN_TRANSLATE_HPP
#define CDMN_TRANSLATE_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cdmn/error.hpp"
#include "cdmn/expr.hpp"
#include "cdmn/fo.hpp"
#include "cdmn/grid.hpp"
#include "cdmn/vocabulary.hpp"

namespace cdmn {

// ---------------------------------------------------------------------------
// Inference task and compiled model
// ---------------------------------------------------------------------------

struct Task {
    enum class Kind { ModelExpand, Minimize, Maximize };
    static constexpr long long kAll = -1;

    Kind kind = Kind::ModelExpand;
    long long count = 1;  // ModelExpand: requested model count, kAll for "all"
    TermPtr objective;    // Minimize/Maximize
};

struct CompiledModel {
    Vocabulary vocabulary; // glossary vocabulary with data-derived domains merged in
    Theory theory;
    Structure data;        // partial structure defined by the data tables
    Task task;
    std::map<std::string, Value> symbol_defaults; // output symbol -> declared default
    std::set<std::string> null_extended;          // output symbols whose domain gains null
};

// ---------------------------------------------------------------------------
// Shared table parsing
// ---------------------------------------------------------------------------

struct ParsedTable {
    const TableBlock* block = nullptr;
    std::vector<HeaderExpr> inputs;
    std::vector<HeaderExpr> outputs;
    Scope scope;
    std::vector<TypedVar> qvars; // variables introduced by input columns, in order

    SourcePos cell_pos(int body_row, int col) const {
        return {block->name, block->origin_row + 2 + body_row, col + 1};
    }
    SourcePos header_pos(int col) const { return {block->name, block->origin_row + 1, col + 1}; }
};

namespace detail {

inline ParsedTable parse_table(const TableBlock& block, const Vocabulary& vocab,
                               HeaderMode output_mode = HeaderMode::Output) {
    ParsedTable t;
    t.block = &block;
    for (int j = 0; j < block.n_inputs; ++j) {
        int col = block.input_col(j);
        t.inputs.push_back(parse_header(block.header_row[col], vocab, t.scope, HeaderMode::Input,
                                        col, t.header_pos(col)));
    }
    for (int k = 0; k < block.n_outputs; ++k) {
        int col = block.output_col(k);
        t.outputs.push_back(
            parse_header(block.header_row[col], vocab, t.scope, output_mode, col, t.header_pos(col)));
    }
    for (const auto& e : t.scope.entries)
        if (e.column >= 0) t.qvars.push_back(e.var);
    return t;
}

inline FormulaPtr simp_and(std::vector<FormulaPtr> conjuncts) {
    std::vector<FormulaPtr> keep;
    for (auto& c : conjuncts) {
        if (c->kind == Formula::Kind::Truth) {
            if (!c->truth) return Formula::mk_truth(false);
            continue;
        }
        keep.push_back(std::move(c));
    }
    if (keep.empty()) return Formula::mk_truth(true);
    if (keep.size() == 1) return keep[0];
    return Formula::mk_and(std::move(keep));
}

inline FormulaPtr simp_implies(FormulaPtr ante, FormulaPtr cons) {
    if (ante->kind == Formula::Kind::Truth) return ante->truth ? cons : Formula::mk_truth(true);
    if (cons->kind == Formula::Kind::Truth && cons->truth) return Formula::mk_truth(true);
    return Formula::mk_implies(std::move(ante), std::move(cons));
}

inline FormulaPtr close(const std::vector<TypedVar>& vars, FormulaPtr body) {
    if (vars.empty()) return body;
    if (body->kind == Formula::Kind::Truth) return body;
    return Formula::mk_forall(vars, std::move(body));
}

// Conjunction of the row's cell formulas over the given columns.
inline FormulaPtr row_formula(const ParsedTable& t, int row, const std::vector<HeaderExpr>& headers,
                              bool is_input, const Vocabulary& vocab, Scope& scope) {
    std::vector<FormulaPtr> conjuncts;
    for (std::size_t j = 0; j < headers.size(); ++j) {
        int col = is_input ? t.block->input_col(static_cast<int>(j))
                           : t.block->output_col(static_cast<int>(j));
        ExprContext ctx{&vocab, &scope, HeaderMode::Input, nullptr, t.cell_pos(row, col)};
        CellExpr cell = parse_cell(t.block->body[row][col]);
        conjuncts.push_back(cell_to_formula(cell, headers[j], ctx));
    }
    return simp_and(std::move(conjuncts));
}

// Sound, incomplete exhaustiveness check used to drop the Eq-2-style
// completion sentence when the rows provably cover every input: a row with
// all-irrelevant inputs, or a pair of rows that differ only in one column
// holding complementary comparisons over the same operand.
inline bool rows_cover_all_inputs(const TableBlock& block) {
    auto cells_of = [&](int row) {
        std::vector<CellExpr> cells;
        for (int j = 0; j < block.n_inputs; ++j)
            cells.push_back(parse_cell(block.body[row][block.input_col(j)]));
        return cells;
    };
    if (block.n_inputs == 0) return !block.body.empty();

    std::vector<std::vector<CellExpr>> rows;
    for (std::size_t r = 0; r < block.body.size(); ++r) rows.push_back(cells_of(static_cast<int>(r)));

    for (const auto& row : rows) {
        bool all_irrelevant = true;
        for (const auto& c : row) all_irrelevant &= c.kind == CellExpr::Kind::Irrelevant;
        if (all_irrelevant) return true;
    }

    auto complementary = [](const CellExpr& a, const CellExpr& b) {
        if (a.kind != CellExpr::Kind::Compare || b.kind != CellExpr::Kind::Compare) return false;
        if (a.text != b.text) return false;
        return a.op == negate_cmp(b.op);
    };
    for (std::size_t r1 = 0; r1 < rows.size(); ++r1)
        for (std::size_t r2 = r1 + 1; r2 < rows.size(); ++r2)
            for (std::size_t j = 0; j < rows[r1].size(); ++j) {
                bool others_irrelevant = true;
                for (std::size_t k = 0; k < rows[r1].size(); ++k) {
                    if (k == j) continue;
                    others_irrelevant &= rows[r1][k].kind == CellExpr::Kind::Irrelevant &&
                                         rows[r2][k].kind == CellExpr::Kind::Irrelevant;
                }
                if (others_irrelevant && complementary(rows[r1][j], rows[r2][j])) return true;
            }
    return false;
}

inline void require_definable_output(const HeaderExpr& h, const ParsedTable& t, int k) {
    if (h.kind == HeaderExpr::Kind::Atom)
        throw Error(ErrorCode::MalformedExpression,
                    "decision table output '" + t.block->header_row[t.block->output_col(k)] +
                        "' is atom-denoting; relation outputs need a constraint table (E*)",
                    t.header_pos(t.block->output_col(k)));
    if (h.kind != HeaderExpr::Kind::Term || h.symbol.empty())
        throw Error(ErrorCode::MalformedExpression,
                    "decision table output header must apply a function or name a constant",
                    t.header_pos(t.block->output_col(k)));
}

inline void require_value_cell(const CellExpr& cell, const ParsedTable& t, int row, int col) {
    if (cell.kind != CellExpr::Kind::Single && cell.kind != CellExpr::Kind::Yes &&
        cell.kind != CellExpr::Kind::No)
        throw Error(ErrorCode::NonValueOutput,
                    "decision table output cell '" + render_cell(cell) +
                        "' must be a single value",
                    t.cell_pos(row, col));
}

struct DefaultSpec {
    std::string symbol;
    Value value;
};

inline std::vector<DefaultSpec> parse_defaults(const ParsedTable& t, const Vocabulary& vocab,
                                               Scope& scope) {
    const TableBlock& block = *t.block;
    if (!block.has_defaults) return {};
    if (block.default_values.size() != static_cast<std::size_t>(block.n_outputs))
        throw Error(ErrorCode::MalformedExpression,
                    "default= lists " + std::to_string(block.default_values.size()) +
                        " values for " + std::to_string(block.n_outputs) + " output columns",
                    {block.name, block.origin_row, 3});
    std::vector<DefaultSpec> out;
    for (int k = 0; k < block.n_outputs; ++k) {
        ExprContext ctx{&vocab, &scope, HeaderMode::Input, nullptr,
                        SourcePos{block.name, block.origin_row, 3}};
        TypedTerm v = parse_term_text(block.default_values[k], ctx);
        if (v.term->kind != Term::Kind::Lit)
            throw Error(ErrorCode::MalformedExpression,
                        "default value '" + block.default_values[k] + "' must be a basic value",
                        ctx.pos);
        if (!types_compatible(vocab, t.outputs[k].type, v.type))
            throw Error(ErrorCode::TypeMismatch,
                        "default value '" + block.default_values[k] +
                            "' does not fit the output type '" + t.outputs[k].type + "'",
                        ctx.pos);
        out.push_back({t.outputs[k].symbol, v.term->lit});
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Decision tables (U/A and F) with the null completion sentence
// ---------------------------------------------------------------------------

struct DecisionTranslation {
    std::vector<FormulaPtr> sentences;
    std::vector<Provenance> provenance;
    std::vector<std::string> defined_symbols;       // one per output column
    std::vector<detail::DefaultSpec> defaults;      // declared default values
    std::vector<std::string> null_extended_symbols; // symbols the completion may set to null
};

namespace detail {

inline DecisionTranslation translate_decision_rows(const TableBlock& block,
                                                   const Vocabulary& vocab, bool first_hit) {
    ParsedTable t = parse_table(block, vocab);
    DecisionTranslation out;

    for (int k = 0; k < block.n_outputs; ++k) {
        require_definable_output(t.outputs[k], t, k);
        out.defined_symbols.push_back(t.outputs[k].symbol);
    }
    out.defaults = parse_defaults(t, vocab, t.scope);

    std::vector<FormulaPtr> input_formulas;
    std::vector<FormulaPtr> implications;
    for (std::size_t r = 0; r < block.body.size(); ++r) {
        int row = static_cast<int>(r);
        for (int k = 0; k < block.n_outputs; ++k)
            require_value_cell(parse_cell(block.body[r][block.output_col(k)]), t, row,
                               block.output_col(k));
        FormulaPtr in = row_formula(t, row, t.inputs, true, vocab, t.scope);
        FormulaPtr outf = row_formula(t, row, t.outputs, false, vocab, t.scope);
        input_formulas.push_back(in);
        FormulaPtr ante = in;
        if (first_hit) {
            // First hit: a row applies only when no earlier row does.
            std::vector<FormulaPtr> conj{in};
            for (std::size_t p = 0; p < r; ++p) {
                if (input_formulas[p]->kind == Formula::Kind::Truth && input_formulas[p]->truth)
                    conj.push_back(Formula::mk_truth(false));
                else if (input_formulas[p]->kind != Formula::Kind::Truth)
                    conj.push_back(Formula::mk_not(input_formulas[p]));
            }
            ante = simp_and(std::move(conj));
        }
        implications.push_back(simp_implies(ante, outf));
    }

    FormulaPtr rules = simp_and(implications);
    out.sentences.push_back(close(t.qvars, rules));
    out.provenance.push_back(
        {block.name, block.origin_row + 2, block.origin_row + 1 + static_cast<int>(block.body.size())});

    // Eq-2-style completion: when no row applies, outputs take their default
    // (if declared) or the reserved null value. Dropped when the rows
    // provably cover all inputs.
    if (!rows_cover_all_inputs(block)) {
        std::vector<FormulaPtr> nones;
        for (const auto& in : input_formulas)
            if (in->kind == Formula::Kind::Truth)
                nones.push_back(Formula::mk_truth(!in->truth));
            else
                nones.push_back(Formula::mk_not(in));
        std::vector<FormulaPtr> consequents;
        for (int k = 0; k < block.n_outputs; ++k) {
            Value fallback = Value::null_value();
            bool has_default = false;
            for (const auto& d : out.defaults)
                if (d.symbol == t.outputs[k].symbol) {
                    fallback = d.value;
                    has_default = true;
                }
            if (!has_default) out.null_extended_symbols.push_back(t.outputs[k].symbol);
            consequents.push_back(
                Formula::mk_cmp(CmpOp::Eq, t.outputs[k].term, Term::mk_lit(fallback)));
        }
        FormulaPtr completion = simp_implies(simp_and(std::move(nones)), simp_and(std::move(consequents)));
        out.sentences.push_back(close(t.qvars, completion));
        out.provenance.push_back({block.name, block.origin_row, block.origin_row});
    }
    return out;
}

} // namespace detail

inline DecisionTranslation translate_decision_table_UA(const TableBlock& block,
                                                       const Vocabulary& vocab) {
    return detail::translate_decision_rows(block, vocab, false);
}

inline DecisionTranslation translate_decision_table_F(const TableBlock& block,
                                                      const Vocabulary& vocab) {
    return detail::translate_decision_rows(block, vocab, true);
}

// ---------------------------------------------------------------------------
// Constraint tables (E*), Eq. 3
// ---------------------------------------------------------------------------

inline FormulaPtr translate_constraint_table(const TableBlock& block, const Vocabulary& vocab) {
    if (block.has_defaults)
        throw Error(ErrorCode::DefaultOnConstraintTable,
                    "constraint tables cannot declare default values",
                    {block.name, block.origin_row, 3});
    ParsedTable t = detail::parse_table(block, vocab);
    std::vector<FormulaPtr> implications;
    for (std::size_t r = 0; r < block.body.size(); ++r) {
        int row = static_cast<int>(r);
        FormulaPtr in = detail::row_formula(t, row, t.inputs, true, vocab, t.scope);
        FormulaPtr outf = detail::row_formula(t, row, t.outputs, false, vocab, t.scope);
        implications.push_back(detail::simp_implies(in, outf));
    }
    return detail::close(t.qvars, detail::simp_and(std::move(implications)));
}

// ---------------------------------------------------------------------------
// Aggregate hit policies: C+ / C< / C> (Eq. 4) and C# (Eq. 5)
// ---------------------------------------------------------------------------

namespace detail {

struct CTableParts {
    ParsedTable table;
    std::vector<TypedVar> outer; // W: variables occurring in the output header
    std::vector<TypedVar> inner; // U: the remaining introduced variables
};

inline CTableParts split_c_table(const TableBlock& block, const Vocabulary& vocab) {
    if (block.n_outputs != 1)
        throw Error(ErrorCode::MultipleOutputs,
                    "aggregate table '" + block.name + "' must have exactly one output column",
                    {block.name, block.origin_row + 1, 0});
    CTableParts parts{parse_table(block, vocab), {}, {}};
    const HeaderExpr& header = parts.table.outputs[0];
    require_definable_output(header, parts.table, 0);
    auto header_vars = free_vars(*header.term);
    for (const auto& v : parts.table.qvars) {
        if (header_vars.count(v)) parts.outer.push_back(v);
        else parts.inner.push_back(v);
    }
    return parts;
}

} // namespace detail

inline FormulaPtr translate_c_aggregate(const TableBlock& block, const Vocabulary& vocab,
                                        AggKind kind) {
    detail::CTableParts parts = detail::split_c_table(block, vocab);
    ParsedTable& t = parts.table;
    const HeaderExpr& header = t.outputs[0];
    if (!vocab.is_numeric_type(header.type))
        throw Error(ErrorCode::NonNumericOutput,
                    "aggregate output '" + t.block->header_row[t.block->output_col(0)] +
                        "' must be numeric",
                    t.header_pos(t.block->output_col(0)));

    std::vector<AggBranch> branches;
    for (std::size_t r = 0; r < block.body.size(); ++r) {
        int row = static_cast<int>(r);
        int col = block.output_col(0);
        CellExpr cell = parse_cell(block.body[r][col]);
        if (cell.kind != CellExpr::Kind::Single)
            throw Error(ErrorCode::NonValueOutput,
                        "aggregate output cell '" + render_cell(cell) + "' must be a single term",
                        t.cell_pos(row, col));
        ExprContext ctx{&vocab, &t.scope, HeaderMode::Input, nullptr, t.cell_pos(row, col)};
        TypedTerm value = parse_term_text(cell.text, ctx);
        if (!vocab.is_numeric_type(value.type))
            throw Error(ErrorCode::NonNumericOutput,
                        "aggregate output cell '" + cell.text + "' is not numeric",
                        t.cell_pos(row, col));
        FormulaPtr cond = detail::row_formula(t, row, t.inputs, true, vocab, t.scope);
        branches.push_back({cond, value.term});
    }
    TermPtr agg = Term::mk_agg(kind, parts.inner, std::move(branches));
    FormulaPtr eq = Formula::mk_cmp(CmpOp::Eq, header.term, agg);
    return detail::close(parts.outer, eq);
}

inline FormulaPtr translate_c_count(const TableBlock& block, const Vocabulary& vocab) {
    detail::CTableParts parts = detail::split_c_table(block, vocab);
    ParsedTable& t = parts.table;
    const HeaderExpr& header = t.outputs[0];
    if (!vocab.is_numeric_type(header.type))
        throw Error(ErrorCode::NonNumericCountTarget,
                    "count output '" + t.block->header_row[t.block->output_col(0)] +
                        "' must be numeric",
                    t.header_pos(t.block->output_col(0)));

    // Parse the counted terms first to find the type the set variable ranges
    // over: the output cells' value type.
    std::vector<TypedTerm> counted;
    std::string counted_type;
    for (std::size_t r = 0; r < block.body.size(); ++r) {
        int row = static_cast<int>(r);
        int col = block.output_col(0);
        CellExpr cell = parse_cell(block.body[r][col]);
        if (cell.kind != CellExpr::Kind::Single)
            throw Error(ErrorCode::NonValueOutput,
                        "count output cell '" + render_cell(cell) + "' must be a single term",
                        t.cell_pos(row, col));
        ExprContext ctx{&vocab, &t.scope, HeaderMode::Input, nullptr, t.cell_pos(row, col)};
        TypedTerm value = parse_term_text(cell.text, ctx);
        if (counted_type.empty() || counted_type == kIntType) counted_type = value.type;
        else if (!detail::types_compatible(vocab, counted_type, value.type))
            throw Error(ErrorCode::TypeMismatch,
                        "count output cells mix types '" + counted_type + "' and '" + value.type +
                            "'",
                        t.cell_pos(row, col));
        counted.push_back(value);
    }
    if (block.body.empty()) // nothing to collect: the count is 0
        return detail::close(parts.outer, Formula::mk_cmp(CmpOp::Eq, header.term, Term::mk_int(0)));
    if (counted_type == kIntType)
        throw Error(ErrorCode::MalformedExpression,
                    "count table '" + block.name +
                        "' needs output cells of a bounded model type for the counted set to "
                        "range over",
                    {block.name, block.origin_row, 1});

    TypedVar x{t.scope.fresh_name("x"), counted_type};
    std::vector<FormulaPtr> row_cases;
    for (std::size_t r = 0; r < block.body.size(); ++r) {
        int row = static_cast<int>(r);
        FormulaPtr eq = Formula::mk_cmp(CmpOp::Eq, Term::mk_var(x), counted[r].term);
        FormulaPtr in = detail::row_formula(t, row, t.inputs, true, vocab, t.scope);
        if (in->kind == Formula::Kind::Truth && in->truth) row_cases.push_back(eq);
        else row_cases.push_back(Formula::mk_and({eq, in}));
    }
    FormulaPtr member = row_cases.empty()     ? Formula::mk_truth(false)
                        : row_cases.size() == 1 ? row_cases[0]
                                                : Formula::mk_or(std::move(row_cases));
    if (!parts.inner.empty()) member = Formula::mk_exists(parts.inner, member);
    TermPtr card = Term::mk_card({x}, member);
    return detail::close(parts.outer, Formula::mk_cmp(CmpOp::Eq, header.term, card));
}

// ---------------------------------------------------------------------------
// Data tables
// ---------------------------------------------------------------------------

namespace detail {

// One basic value from a data cell item, checked or registered against the
// expected type's domain.
inline Value data_value(const std::string& item, const std::string& type, Vocabulary& vocab,
                        const SourcePos& pos) {
    long long n;
    Value v;
    if (parse_integer(item, n)) {
        v = Value::integer(n);
        if (!vocab.is_numeric_type(type))
            throw Error(ErrorCode::TypeMismatch,
                        "number '" + item + "' in a column of type '" + type + "'", pos);
    } else {
        auto tokens = words(item);
        if (tokens.size() != 1)
            throw Error(ErrorCode::NonBasicValue,
                        "'" + item + "' is not a basic value (multi-word elements use underscores)",
                        pos);
        v = Value::element(item);
        if (vocab.is_numeric_type(type))
            throw Error(ErrorCode::TypeMismatch,
                        "element '" + item + "' in a numeric column of type '" + type + "'", pos);
    }
    if (type == kIntType) return v;
    const TypeDecl& decl = vocab.type(type);
    if (decl.declared) {
        for (const auto& existing : decl.domain)
            if (existing == v) return v;
        throw Error(ErrorCode::UnknownDomainElement,
                    "value '" + item + "' is not in the declared domain of type '" + type + "'",
                    pos);
    }
    vocab.add_domain_element(type, v, pos);
    return v;
}

inline std::vector<std::string> data_cell_items(const std::string& cell) {
    std::vector<std::string> items;
    std::string cur;
    for (char c : cell) {
        if (c == ',') {
            items.push_back(std::string(trim(cur)));
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::string last = std::string(trim(cur));
    if (!last.empty()) items.push_back(last);
    else if (!items.empty())
        items.push_back(last); // trailing comma: surface as empty item error below
    for (const auto& item : items)
        if (item.empty())
            throw Error(ErrorCode::NonBasicValue, "empty entry in data cell '" + cell + "'");
    return items;
}

} // namespace detail

// Fills the partial structure from one data table. Key columns introduce
// variables; value columns apply a function (all arguments bound by keys) or
// a relation with exactly one open slot filled by the cell values. Relation
// symbols are closed-world: tuples not listed are false.
inline void translate_data_table(const TableBlock& block, Vocabulary& vocab, Structure& data,
                                 std::set<std::string>& data_symbols) {
    if (block.has_defaults)
        throw Error(ErrorCode::MalformedExpression, "data tables cannot declare default values",
                    {block.name, block.origin_row, 3});
    ParsedTable t = detail::parse_table(block, vocab, HeaderMode::DataValue);

    for (int j = 0; j < block.n_inputs; ++j)
        if (t.inputs[j].kind != HeaderExpr::Kind::Var || !t.inputs[j].introduced)
            throw Error(ErrorCode::MalformedExpression,
                        "data key column '" + block.header_row[block.input_col(j)] +
                            "' must introduce a type variable",
                        t.header_pos(block.input_col(j)));

    struct ValueColumn {
        enum class Kind { Function, Relation } kind;
        std::string symbol;
        // Argument sources: index into key columns, -1 for the fresh slot,
        // -2 for a literal argument baked into the header.
        std::vector<int> arg_sources;
        std::vector<Value> arg_literals;
        std::string slot_type;   // Relation: type of the open slot
        std::string result_type; // Function: result type
    };

    auto classify_value_column = [&](const HeaderExpr& h, int col) -> ValueColumn {
        ValueColumn vc;
        const std::vector<TermPtr>* args = nullptr;
        if (h.kind == HeaderExpr::Kind::Term && h.term->kind == Term::Kind::FuncApp) {
            vc.kind = ValueColumn::Kind::Function;
            vc.symbol = h.term->symbol;
            vc.result_type = h.type;
            args = &h.term->args;
            if (!h.fresh.empty())
                throw Error(ErrorCode::MalformedExpression,
                            "function data column cannot have an open argument slot",
                            t.header_pos(col));
        } else if (h.kind == HeaderExpr::Kind::Atom) {
            vc.kind = ValueColumn::Kind::Relation;
            vc.symbol = h.atom->symbol;
            args = &h.atom->args;
            if (h.fresh.size() != 1)
                throw Error(ErrorCode::MalformedExpression,
                            "relation data column needs exactly one open argument slot "
                            "(a type name not bound by the key columns)",
                            t.header_pos(col));
            vc.slot_type = h.fresh[0].type;
        } else {
            throw Error(ErrorCode::MalformedExpression,
                        "data value column must apply a function or relation",
                        t.header_pos(col));
        }
        for (const auto& arg : *args) {
            if (arg->kind == Term::Kind::Var) {
                if (!h.fresh.empty() && arg->var == h.fresh[0]) {
                    vc.arg_sources.push_back(-1);
                    continue;
                }
                int key_index = -3;
                for (std::size_t j = 0; j < t.inputs.size(); ++j)
                    if (t.inputs[j].var == arg->var) key_index = static_cast<int>(j);
                if (key_index < 0)
                    throw Error(ErrorCode::MalformedExpression,
                                "data column argument '" + arg->var.name +
                                    "' is not a key column variable",
                                t.header_pos(col));
                vc.arg_sources.push_back(key_index);
            } else if (arg->kind == Term::Kind::Lit) {
                vc.arg_sources.push_back(-2);
                vc.arg_literals.push_back(arg->lit);
            } else {
                throw Error(ErrorCode::NonBasicValue,
                            "data column arguments must be key variables or basic values",
                            t.header_pos(col));
            }
        }
        return vc;
    };

    std::vector<ValueColumn> value_columns;
    for (int k = 0; k < block.n_outputs; ++k)
        value_columns.push_back(classify_value_column(t.outputs[k], block.output_col(k)));
    for (const auto& vc : value_columns) {
        data_symbols.insert(vc.symbol);
        if (vc.kind == ValueColumn::Kind::Relation) data.rels[vc.symbol]; // closed world
        else data.funcs[vc.symbol];
    }

    // Row expansion: cartesian product over key cell value lists, then one
    // assertion per value-column cell item.
    for (std::size_t r = 0; r < block.body.size(); ++r) {
        int row = static_cast<int>(r);
        std::vector<std::vector<Value>> key_values;
        for (int j = 0; j < block.n_inputs; ++j) {
            SourcePos pos = t.cell_pos(row, block.input_col(j));
            std::vector<Value> vals;
            for (const auto& item : detail::data_cell_items(block.body[r][block.input_col(j)]))
                vals.push_back(detail::data_value(item, t.inputs[j].var.type, vocab, pos));
            key_values.push_back(std::move(vals));
        }

        std::vector<std::vector<Value>> key_tuples{{}};
        for (const auto& vals : key_values) {
            std::vector<std::vector<Value>> next;
            for (const auto& tuple : key_tuples)
                for (const auto& v : vals) {
                    auto extended = tuple;
                    extended.push_back(v);
                    next.push_back(std::move(extended));
                }
            key_tuples = std::move(next);
        }

        for (int k = 0; k < block.n_outputs; ++k) {
            const ValueColumn& vc = value_columns[k];
            SourcePos pos = t.cell_pos(row, block.output_col(k));
            std::string expected_type =
                vc.kind == ValueColumn::Kind::Function ? vc.result_type : vc.slot_type;
            std::vector<Value> cell_values;
            for (const auto& item : detail::data_cell_items(block.body[r][block.output_col(k)]))
                cell_values.push_back(detail::data_value(item, expected_type, vocab, pos));

            for (const auto& key_tuple : key_tuples) {
                for (const auto& v : cell_values) {
                    std::vector<Value> args;
                    std::size_t lit_index = 0;
                    for (int src : vc.arg_sources) {
                        if (src == -1) args.push_back(v);
                        else if (src == -2) args.push_back(vc.arg_literals[lit_index++]);
                        else args.push_back(key_tuple[src]);
                    }
                    if (vc.kind == ValueColumn::Kind::Relation) {
                        data.rels[vc.symbol].insert(std::move(args));
                    } else {
                        auto& interp = data.funcs[vc.symbol];
                        auto it = interp.find(args);
                        if (it != interp.end() && !(it->second == v))
                            throw Error(ErrorCode::ConflictingData,
                                        "function '" + vc.symbol + "' gets both '" +
                                            it->second.str() + "' and '" + v.str() +
                                            "' for the same arguments",
                                        pos);
                        interp[args] = v;
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Goal table
// ---------------------------------------------------------------------------

inline Task translate_goal(const TableBlock& block, const Vocabulary& vocab) {
    const std::vector<std::string>& row = block.body.at(0);
    std::string text;
    for (std::size_t c = 0; c < row.size(); ++c) {
        if (row[c].empty()) continue;
        if (!text.empty())
            throw Error(ErrorCode::MalformedGoal, "goal row must be a single cell",
                        {block.name, block.origin_row + 1, static_cast<int>(c) + 1});
        text = row[c];
    }
    if (text.empty())
        throw Error(ErrorCode::MalformedGoal, "goal row is empty",
                    {block.name, block.origin_row + 1, 1});

    auto tokens = detail::words(text);
    SourcePos pos{block.name, block.origin_row + 1, 1};
    Task task;
    if (tokens[0] == "get") {
        if (tokens.size() != 3 || (tokens[2] != "models" && tokens[2] != "model"))
            throw Error(ErrorCode::MalformedGoal,
                        "expected 'get <N|all> models', got '" + text + "'", pos);
        task.kind = Task::Kind::ModelExpand;
        if (tokens[1] == "all") {
            task.count = Task::kAll;
        } else {
            long long n;
            if (!detail::parse_integer(tokens[1], n) || n <= 0)
                throw Error(ErrorCode::MalformedGoal,
                            "model count '" + tokens[1] + "' must be a positive integer", pos);
            task.count = n;
        }
        return task;
    }
    if (tokens[0] == "minimize" || tokens[0] == "maximize") {
        std::string term_text = detail::trim(text.substr(tokens[0].size()));
        Scope scope;
        ExprContext ctx{&vocab, &scope, HeaderMode::Input, nullptr, pos};
        TypedTerm term;
        try {
            term = parse_term_text(term_text, ctx);
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedGoal,
                        "cannot parse optimization term '" + term_text + "': " + e.what(), pos);
        }
        if (!vocab.is_numeric_type(term.type))
            throw Error(ErrorCode::MalformedGoal,
                        "optimization term '" + term_text + "' is not numeric", pos);
        task.kind = tokens[0] == "minimize" ? Task::Kind::Minimize : Task::Kind::Maximize;
        task.objective = term.term;
        return task;
    }
    throw Error(ErrorCode::MalformedGoal,
                "goal must be 'get <N|all> models', 'minimize <term>' or 'maximize <term>'", pos);
}

// ---------------------------------------------------------------------------
// Whole-model compilation
// ---------------------------------------------------------------------------

inline CompiledModel compile(const std::vector<TableBlock>& blocks, const Vocabulary& vocab_in) {
    CompiledModel model;
    model.vocabulary = vocab_in;
    Vocabulary& vocab = model.vocabulary;

    std::set<std::string> data_symbols;
    for (const auto& b : blocks)
        if (b.kind == BlockKind::Data)
            translate_data_table(b, vocab, model.data, data_symbols);

    // Functions and constants given any data must be total over their
    // argument domains.
    for (const auto& symbol : data_symbols) {
        auto fit = model.data.funcs.find(symbol);
        if (fit == model.data.funcs.end()) continue;
        const Signature& sig = *vocab.find_symbol(symbol);
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
        for (const auto& tuple : tuples) {
            if (fit->second.count(tuple)) continue;
            std::string args;
            for (std::size_t i = 0; i < tuple.size(); ++i)
                args += (i ? ", " : "") + tuple[i].str();
            throw Error(ErrorCode::IncompleteFunctionData,
                        "data for function '" + symbol + "' is missing a value for (" + args +
                            "); function data tables must be complete");
        }
    }

    auto note_defined = [&](const std::string& symbol, const TableBlock& b) {
        if (data_symbols.count(symbol))
            throw Error(ErrorCode::DataDecisionOverlap,
                        "symbol '" + symbol +
                            "' is interpreted by a data table and defined by table '" + b.name +
                            "'",
                        {b.name, b.origin_row, 1});
    };

    for (const auto& b : blocks) {
        switch (b.kind) {
            case BlockKind::Decision: {
                if (b.hit_policy == HitPolicy::U || b.hit_policy == HitPolicy::A ||
                    b.hit_policy == HitPolicy::F) {
                    DecisionTranslation dt = b.hit_policy == HitPolicy::F
                                                 ? translate_decision_table_F(b, vocab)
                                                 : translate_decision_table_UA(b, vocab);
                    for (const auto& s : dt.defined_symbols) note_defined(s, b);
                    for (std::size_t i = 0; i < dt.sentences.size(); ++i) {
                        model.theory.sentences.push_back(dt.sentences[i]);
                        model.theory.provenance.push_back(dt.provenance[i]);
                    }
                    for (const auto& d : dt.defaults) {
                        auto it = model.symbol_defaults.find(d.symbol);
                        if (it != model.symbol_defaults.end() && !(it->second == d.value))
                            throw Error(ErrorCode::ConflictingData,
                                        "symbol '" + d.symbol + "' has two different defaults",
                                        {b.name, b.origin_row, 3});
                        model.symbol_defaults[d.symbol] = d.value;
                    }
                    for (const auto& s : dt.null_extended_symbols) model.null_extended.insert(s);
                } else {
                    if (b.has_defaults)
                        throw Error(ErrorCode::DefaultOnConstraintTable,
                                    "default values only apply to U/A/F decision tables",
                                    {b.name, b.origin_row, 3});
                    AggKind kind = AggKind::Sum;
                    bool is_count = b.hit_policy == HitPolicy::CCount;
                    if (b.hit_policy == HitPolicy::CLess) kind = AggKind::Min;
                    if (b.hit_policy == HitPolicy::CGreater) kind = AggKind::Max;
                    FormulaPtr sentence = is_count ? translate_c_count(b, vocab)
                                                   : translate_c_aggregate(b, vocab, kind);
                    // The defined symbol is the outermost application of the
                    // single output header.
                    ParsedTable pt = detail::parse_table(b, vocab);
                    note_defined(pt.outputs[0].symbol, b);
                    model.theory.sentences.push_back(sentence);
                    model.theory.provenance.push_back(
                        {b.name, b.origin_row + 2,
                         b.origin_row + 1 + static_cast<int>(b.body.size())});
                }
                break;
            }
            case BlockKind::Constraint: {
                model.theory.sentences.push_back(translate_constraint_table(b, vocab));
                model.theory.provenance.push_back(
                    {b.name, b.origin_row + 2,
                     b.origin_row + 1 + static_cast<int>(b.body.size())});
                break;
            }
            default: break;
        }
    }

    bool have_goal = false;
    for (const auto& b : blocks) {
        if (b.kind != BlockKind::Goal) continue;
        if (have_goal)
            throw Error(ErrorCode::MultipleGoalTables, "at most one goal table is allowed",
                        {b.name, b.origin_row, 1});
        have_goal = true;
        model.task = translate_goal(b, vocab);
    }
    return model;
}

inline CompiledModel compile_workbook(const std::string& text) {
    auto blocks = segment_blocks(text);
    std::vector<TableBlock> glossary;
    for (const auto& b : blocks)
        if (b.is_glossary()) glossary.push_back(b);
    Vocabulary vocab = build_vocabulary(glossary);
    return compile(blocks, vocab);
}

} // namespace cdmn

#endif
