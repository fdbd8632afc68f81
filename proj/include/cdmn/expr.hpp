#ifndef CDMN_EXPR_HPP
#define CDMN_EXPR_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdmn/error.hpp"
#include "cdmn/fo.hpp"
#include "cdmn/vocabulary.hpp"

namespace cdmn {

// ---------------------------------------------------------------------------
// Cell entries (S-FEEL)
// ---------------------------------------------------------------------------

// Syntactic classification of a cell entry. Embedded expressions stay as raw
// text; they are resolved against the vocabulary and table scope when the
// cell is turned into a formula.
struct CellExpr {
    enum class Kind { Irrelevant, Compare, Not, List, Range, Single, Yes, No };

    Kind kind = Kind::Irrelevant;
    CmpOp op = CmpOp::Eq;           // Compare
    std::string text;               // Compare / Not / Single payload; Yes/No original spelling
    std::vector<std::string> items; // List
    std::string lo, hi;             // Range
    bool lo_closed = false, hi_closed = false;

    friend bool operator==(const CellExpr& a, const CellExpr& b) {
        return a.kind == b.kind && a.op == b.op && a.text == b.text && a.items == b.items &&
               a.lo == b.lo && a.hi == b.hi && a.lo_closed == b.lo_closed &&
               a.hi_closed == b.hi_closed;
    }
};

namespace detail {

// Splits on commas that are not nested inside parentheses or brackets.
inline std::optional<std::vector<std::string>> split_top_level(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        if (c == ',' && depth == 0) {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(trim(cur));
    if (parts.size() < 2) return std::nullopt;
    return parts;
}

inline bool strip_prefix(std::string& s, const char* prefix) {
    std::string_view p(prefix);
    if (s.rfind(prefix, 0) == 0) {
        s = trim(s.substr(p.size()));
        return true;
    }
    return false;
}

} // namespace detail

inline CellExpr parse_cell(const std::string& raw) {
    CellExpr cell;
    std::string text = detail::trim(raw);

    if (text.empty() || text == "-") {
        cell.kind = CellExpr::Kind::Irrelevant;
        return cell;
    }

    // Range: "[lo, hi)" and the other closedness combinations.
    if ((text.front() == '[' || text.front() == '(') &&
        (text.back() == ']' || text.back() == ')')) {
        std::string inner = text.substr(1, text.size() - 2);
        std::vector<std::string> parts;
        std::string cur;
        int depth = 0;
        bool balanced = true;
        for (char c : inner) {
            if (c == '(' || c == '[') ++depth;
            if (c == ')' || c == ']') --depth;
            if (depth < 0) balanced = false;
            if (c == ',' && depth == 0) {
                parts.push_back(std::string(detail::trim(cur)));
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(std::string(detail::trim(cur)));
        if (balanced && parts.size() == 2) {
            if (parts[0].empty() || parts[1].empty())
                throw Error(ErrorCode::MalformedRange, "range '" + text + "' is missing a bound");
            cell.kind = CellExpr::Kind::Range;
            cell.lo = parts[0];
            cell.hi = parts[1];
            cell.lo_closed = text.front() == '[';
            cell.hi_closed = text.back() == ']';
            return cell;
        }
        if (balanced && parts.size() > 2)
            throw Error(ErrorCode::MalformedRange,
                        "range '" + text + "' must have exactly two bounds");
        // Otherwise fall through: a parenthesized term such as "(a + b)".
    }

    if (auto items = detail::split_top_level(text)) {
        cell.kind = CellExpr::Kind::List;
        cell.items = *items;
        for (const auto& item : cell.items)
            if (item.empty())
                throw Error(ErrorCode::MalformedExpression, "empty entry in list '" + text + "'");
        return cell;
    }

    struct OpSpelling {
        const char* spelling;
        CmpOp op;
    };
    // Two-character ASCII spellings must be tried before one-character ones.
    static const OpSpelling spellings[] = {
        {"<=", CmpOp::Leq}, {">=", CmpOp::Geq}, {"!=", CmpOp::Neq},
        {"≤", CmpOp::Leq}, {"≥", CmpOp::Geq}, {"≠", CmpOp::Neq},
        {"<", CmpOp::Lt}, {">", CmpOp::Gt}, {"=", CmpOp::Eq},
    };
    for (const auto& s : spellings) {
        std::string rest = text;
        if (detail::strip_prefix(rest, s.spelling)) {
            if (rest.empty())
                throw Error(ErrorCode::MalformedExpression,
                            "comparison cell '" + text + "' is missing its operand");
            cell.kind = CellExpr::Kind::Compare;
            cell.op = s.op;
            cell.text = rest;
            return cell;
        }
    }

    {
        std::string rest = text;
        if (detail::strip_prefix(rest, "Not ") || detail::strip_prefix(rest, "not ")) {
            cell.kind = CellExpr::Kind::Not;
            cell.text = rest;
            return cell;
        }
    }

    std::string low = detail::lowercase(text);
    if (low == "yes" || low == "no") {
        cell.kind = low == "yes" ? CellExpr::Kind::Yes : CellExpr::Kind::No;
        cell.text = text;
        return cell;
    }

    cell.kind = CellExpr::Kind::Single;
    cell.text = text;
    return cell;
}

// Canonical rendering; parse_cell(render_cell(c)) == c.
inline std::string render_cell(const CellExpr& cell) {
    switch (cell.kind) {
        case CellExpr::Kind::Irrelevant: return "-";
        case CellExpr::Kind::Compare: {
            const char* op = "=";
            switch (cell.op) {
                case CmpOp::Eq: op = "="; break;
                case CmpOp::Neq: op = "!="; break;
                case CmpOp::Lt: op = "<"; break;
                case CmpOp::Leq: op = "<="; break;
                case CmpOp::Gt: op = ">"; break;
                case CmpOp::Geq: op = ">="; break;
            }
            return std::string(op) + " " + cell.text;
        }
        case CellExpr::Kind::Not: return "Not " + cell.text;
        case CellExpr::Kind::List: {
            std::string out;
            for (std::size_t i = 0; i < cell.items.size(); ++i) {
                if (i) out += ", ";
                out += cell.items[i];
            }
            return out;
        }
        case CellExpr::Kind::Range:
            return std::string(cell.lo_closed ? "[" : "(") + cell.lo + ", " + cell.hi +
                   (cell.hi_closed ? "]" : ")");
        case CellExpr::Kind::Yes: return "Yes";
        case CellExpr::Kind::No: return "No";
        case CellExpr::Kind::Single: return cell.text;
    }
    return "";
}

// ---------------------------------------------------------------------------
// Table scopes
// ---------------------------------------------------------------------------

// Variables introduced by variable-introducing columns, in left-to-right
// order. A bare type header is keyed by the type name; "Type called v" is
// keyed by v. Later uses of the key refer back to the same variable.
struct Scope {
    struct Entry {
        std::string key;
        TypedVar var;
        int column = -1; // introducing column (0-based), -1 for internal vars
    };
    std::vector<Entry> entries;

    const Entry* find(const std::string& key) const {
        for (const auto& e : entries)
            if (e.key == key) return &e;
        return nullptr;
    }
    const Entry* find_var(const std::string& var_name) const {
        for (const auto& e : entries)
            if (e.var.name == var_name) return &e;
        return nullptr;
    }

    std::vector<TypedVar> vars() const {
        std::vector<TypedVar> out;
        for (const auto& e : entries) out.push_back(e.var);
        return out;
    }

    std::string fresh_name(const std::string& base) const {
        if (!find_var(base)) return base;
        for (int i = 2;; ++i) {
            std::string candidate = base + std::to_string(i);
            if (!find_var(candidate)) return candidate;
        }
    }
};

// Where a header appears; decides whether variable expressions may introduce.
enum class HeaderMode {
    Input,     // decision/constraint inputs and data key columns: may introduce
    Output,    // decision/constraint outputs: variable expressions are errors
    DataValue, // data value columns: one fresh slot allowed, bound per cell
};

struct HeaderExpr {
    enum class Kind { Var, Term, Atom };

    Kind kind = Kind::Term;
    TypedVar var;            // Var
    bool introduced = false; // Var: this column introduced it
    TermPtr term;            // Var and Term kinds (for Var, the variable itself)
    FormulaPtr atom;         // Atom
    std::string type;        // value type of Var/Term headers
    std::string symbol;      // canonical symbol when the header is a direct application
    std::vector<TypedVar> fresh; // fresh slot variables (DataValue mode)
};

// ---------------------------------------------------------------------------
// Term grammar over cell and header texts
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
    enum class Kind { Word, Int, Op, LParen, RParen, Hash, Called };
    Kind kind;
    std::string word;
    long long value = 0;
    ArithOp op = ArithOp::Add;
};

inline std::vector<Token> lex_expr(const std::string& text, const SourcePos& pos) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto push_op = [&](ArithOp op) { out.push_back({Token::Kind::Op, "", 0, op}); };
    while (i < text.size()) {
        unsigned char c = text[i];
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (c == '(') {
            out.push_back({Token::Kind::LParen, "", 0, ArithOp::Add});
            ++i;
            continue;
        }
        if (c == ')') {
            out.push_back({Token::Kind::RParen, "", 0, ArithOp::Add});
            ++i;
            continue;
        }
        if (c == '#') {
            out.push_back({Token::Kind::Hash, "", 0, ArithOp::Add});
            ++i;
            continue;
        }
        if (c == '+') { push_op(ArithOp::Add); ++i; continue; }
        if (c == '-') { push_op(ArithOp::Sub); ++i; continue; }
        if (c == '*') { push_op(ArithOp::Mul); ++i; continue; }
        if (c == '/') { push_op(ArithOp::Div); ++i; continue; }
        if (text.compare(i, 2, "\xC3\x97") == 0) { push_op(ArithOp::Mul); i += 2; continue; }
        if (text.compare(i, 2, "\xC3\xB7") == 0) { push_op(ArithOp::Div); i += 2; continue; }
        if (std::isdigit(c)) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            Token t{Token::Kind::Int, "", 0, ArithOp::Add};
            t.value = std::stoll(text.substr(i, j - i));
            out.push_back(t);
            i = j;
            continue;
        }
        // Word: run of characters that are not whitespace, operators or parens.
        std::size_t j = i;
        while (j < text.size()) {
            unsigned char d = text[j];
            if (std::isspace(d) || d == '(' || d == ')' || d == '#' || d == '+' || d == '-' ||
                d == '*' || d == '/')
                break;
            if (text.compare(j, 2, "\xC3\x97") == 0 || text.compare(j, 2, "\xC3\xB7") == 0) break;
            ++j;
        }
        if (j == i)
            throw Error(ErrorCode::MalformedExpression, "cannot tokenize '" + text + "'", pos);
        Token t{Token::Kind::Word, text.substr(i, j - i), 0, ArithOp::Add};
        if (t.word == "called") t.kind = Token::Kind::Called;
        out.push_back(t);
        i = j;
    }
    return out;
}

} // namespace detail

struct TypedTerm {
    TermPtr term;
    std::string type; // type name; kIntType for arithmetic results
};

// Context for resolving cell/header expressions against the vocabulary and
// the table scope.
struct ExprContext {
    const Vocabulary* vocab = nullptr;
    Scope* scope = nullptr;
    HeaderMode mode = HeaderMode::Input;
    std::vector<TypedVar>* fresh = nullptr; // DataValue: fresh slots introduced
    SourcePos pos;
};

namespace detail {

inline bool types_compatible(const Vocabulary& vocab, const std::string& a, const std::string& b) {
    if (a == b) return true;
    return vocab.is_numeric_type(a) && vocab.is_numeric_type(b);
}

inline TypedTerm resolve_phrase_term(const std::string& phrase, const ExprContext& ctx);

class TermParser {
public:
    TermParser(std::vector<Token> tokens, const ExprContext& ctx)
        : tokens_(std::move(tokens)), ctx_(ctx) {}

    TypedTerm parse() {
        TypedTerm t = parse_sum();
        if (pos_ != tokens_.size())
            throw Error(ErrorCode::MalformedExpression, "trailing tokens in expression", ctx_.pos);
        return t;
    }

private:
    const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }

    TypedTerm parse_sum() {
        TypedTerm left = parse_product();
        while (const Token* t = peek()) {
            if (t->kind != Token::Kind::Op || (t->op != ArithOp::Add && t->op != ArithOp::Sub))
                break;
            ArithOp op = t->op;
            ++pos_;
            TypedTerm right = parse_product();
            left = combine(op, left, right);
        }
        return left;
    }

    TypedTerm parse_product() {
        TypedTerm left = parse_unary();
        while (const Token* t = peek()) {
            if (t->kind != Token::Kind::Op || (t->op != ArithOp::Mul && t->op != ArithOp::Div))
                break;
            ArithOp op = t->op;
            ++pos_;
            TypedTerm right = parse_unary();
            left = combine(op, left, right);
        }
        return left;
    }

    TypedTerm parse_unary() {
        if (const Token* t = peek(); t && t->kind == Token::Kind::Op && t->op == ArithOp::Sub) {
            ++pos_;
            TypedTerm inner = parse_unary();
            require_numeric(inner);
            if (inner.term->kind == Term::Kind::Lit && inner.term->lit.is_int())
                return {Term::mk_int(-inner.term->lit.num), kIntType};
            return {Term::mk_arith(ArithOp::Sub, Term::mk_int(0), inner.term), kIntType};
        }
        return parse_primary();
    }

    TypedTerm parse_primary() {
        const Token* t = peek();
        if (!t)
            throw Error(ErrorCode::MalformedExpression, "expression ends unexpectedly", ctx_.pos);
        if (t->kind == Token::Kind::LParen) {
            ++pos_;
            TypedTerm inner = parse_sum();
            if (!peek() || peek()->kind != Token::Kind::RParen)
                throw Error(ErrorCode::MalformedExpression, "missing ')'", ctx_.pos);
            ++pos_;
            return inner;
        }
        if (t->kind == Token::Kind::Int) {
            ++pos_;
            return {Term::mk_int(t->value), kIntType};
        }
        if (t->kind == Token::Kind::Hash) {
            ++pos_;
            const Token* w = peek();
            if (!w || w->kind != Token::Kind::Word)
                throw Error(ErrorCode::MalformedExpression, "'#' must be followed by a type name",
                            ctx_.pos);
            if (!ctx_.vocab->has_type(w->word))
                throw Error(ErrorCode::UnknownType, "unknown type '#" + w->word + "'", ctx_.pos);
            ++pos_;
            std::string name = ctx_.scope ? ctx_.scope->fresh_name("x") : "x";
            return {Term::mk_card({TypedVar{name, w->word}}, Formula::mk_truth(true)), kIntType};
        }
        if (t->kind == Token::Kind::Word || t->kind == Token::Kind::Called) {
            std::string phrase;
            while (const Token* w = peek()) {
                if (w->kind != Token::Kind::Word && w->kind != Token::Kind::Called) break;
                if (!phrase.empty()) phrase += ' ';
                phrase += w->word.empty() ? "called" : w->word;
                ++pos_;
            }
            return resolve_phrase_term(phrase, ctx_);
        }
        throw Error(ErrorCode::MalformedExpression, "unexpected token in expression", ctx_.pos);
    }

    void require_numeric(const TypedTerm& t) {
        if (!ctx_.vocab->is_numeric_type(t.type))
            throw Error(ErrorCode::TypeMismatch,
                        "arithmetic over non-numeric operand of type '" + t.type + "'", ctx_.pos);
    }

    TypedTerm combine(ArithOp op, const TypedTerm& l, const TypedTerm& r) {
        require_numeric(l);
        require_numeric(r);
        return {Term::mk_arith(op, l.term, r.term), kIntType};
    }

    std::vector<Token> tokens_;
    ExprContext ctx_;
    std::size_t pos_ = 0;
};

// Resolves a pure word phrase as a term: scope variables first, then the
// vocabulary (auto-constants, constants, function templates).
inline TypedTerm resolve_phrase_term(const std::string& phrase, const ExprContext& ctx) {
    if (ctx.scope) {
        if (const Scope::Entry* e = ctx.scope->find(phrase))
            return {Term::mk_var(e->var), e->var.type};
        if (const Scope::Entry* e = ctx.scope->find_var(phrase))
            return {Term::mk_var(e->var), e->var.type};
    }
    // A data value column may use one fresh type slot, bound per cell.
    if (ctx.mode == HeaderMode::DataValue && ctx.vocab->has_type(phrase)) {
        TypedVar fresh{ctx.scope ? ctx.scope->fresh_name("v_" + phrase) : "v_" + phrase, phrase};
        if (ctx.fresh) ctx.fresh->push_back(fresh);
        if (ctx.scope) ctx.scope->entries.push_back({phrase, fresh, -1});
        return {Term::mk_var(fresh), fresh.type};
    }

    Resolution r = resolve_symbol(phrase, *ctx.vocab, ctx.pos);
    if (r.kind == Resolution::Kind::AutoConstant)
        return {Term::mk_elem(r.element), r.element_type};

    const Signature& sig = *r.signature;
    if (sig.is_predicate())
        throw Error(ErrorCode::TypeMismatch,
                    "'" + phrase + "' names a relation/boolean, expected a term", ctx.pos);
    std::vector<TermPtr> args;
    for (std::size_t i = 0; i < r.args.size(); ++i) {
        TypedTerm arg = resolve_phrase_term(r.args[i], ctx);
        if (!types_compatible(*ctx.vocab, arg.type, sig.arg_types[i]))
            throw Error(ErrorCode::TypeMismatch,
                        "argument '" + r.args[i] + "' of '" + phrase + "' has type '" + arg.type +
                            "', expected '" + sig.arg_types[i] + "'",
                        ctx.pos);
        args.push_back(arg.term);
    }
    return {Term::mk_func(sig.canonical, std::move(args)), sig.result_type};
}

} // namespace detail

// Parses a term expression (cell entry payloads, header argument phrases,
// arithmetic header expressions).
inline TypedTerm parse_term_text(const std::string& text, const ExprContext& ctx) {
    auto tokens = detail::lex_expr(text, ctx.pos);
    if (tokens.empty())
        throw Error(ErrorCode::MalformedExpression, "empty expression", ctx.pos);
    return detail::TermParser(std::move(tokens), ctx).parse();
}

// ---------------------------------------------------------------------------
// Header expressions
// ---------------------------------------------------------------------------

inline HeaderExpr parse_header(const std::string& raw, const Vocabulary& vocab, Scope& scope,
                               HeaderMode mode, int column, SourcePos pos = {}) {
    std::string text = detail::trim(raw);
    ExprContext ctx;
    ctx.vocab = &vocab;
    ctx.scope = &scope;
    ctx.mode = mode;
    ctx.pos = pos;

    auto tokens = detail::lex_expr(text, pos);
    if (tokens.empty())
        throw Error(ErrorCode::MalformedExpression, "empty column header", pos);

    bool word_run = true;
    for (const auto& t : tokens)
        word_run &= t.kind == detail::Token::Kind::Word || t.kind == detail::Token::Kind::Called;

    auto make_var_header = [&](const std::string& key, const std::string& type,
                               const std::string& var_name) {
        const Scope::Entry* existing = scope.find(key);
        HeaderExpr h;
        h.kind = HeaderExpr::Kind::Var;
        if (existing) {
            if (existing->var.type != type)
                throw Error(ErrorCode::VariableRedeclaration,
                            "'" + key + "' already names a variable of type '" +
                                existing->var.type + "'",
                            pos);
            h.var = existing->var;
            h.introduced = false;
        } else {
            if (mode == HeaderMode::Output)
                throw Error(ErrorCode::UnboundOutputVariable,
                            "output header '" + text + "' is a variable expression; "
                            "variables may only be introduced by input columns",
                            pos);
            h.var = TypedVar{var_name, type};
            h.introduced = true;
            scope.entries.push_back({key, h.var, column});
        }
        h.term = Term::mk_var(h.var);
        h.type = type;
        return h;
    };

    if (word_run) {
        // "Type called v"
        if (tokens.size() == 3 && tokens[1].kind == detail::Token::Kind::Called) {
            const std::string& type = tokens[0].word;
            const std::string& name = tokens[2].word;
            if (!vocab.has_type(type))
                throw Error(ErrorCode::UnknownHeaderSymbol,
                            "'" + type + "' is not a declared type", pos);
            if (vocab.has_type(name))
                throw Error(ErrorCode::VariableRedeclaration,
                            "variable name '" + name + "' collides with a type name", pos);
            if (vocab.find_symbol(name) || vocab.auto_constants.count(name))
                throw Error(ErrorCode::VariableRedeclaration,
                            "variable name '" + name + "' would shadow a declared symbol", pos);
            return make_var_header(name, type, name);
        }
        // Bare type name or reference to an in-scope variable.
        if (tokens.size() == 1) {
            const std::string& word = tokens[0].word;
            if (const Scope::Entry* e = scope.find(word)) {
                if (mode == HeaderMode::Output)
                    throw Error(ErrorCode::UnboundOutputVariable,
                                "output header '" + text + "' is a variable expression", pos);
                HeaderExpr h;
                h.kind = HeaderExpr::Kind::Var;
                h.var = e->var;
                h.term = Term::mk_var(e->var);
                h.type = e->var.type;
                return h;
            }
            if (vocab.has_type(word)) {
                if (mode == HeaderMode::DataValue)
                    throw Error(ErrorCode::MalformedExpression,
                                "data value column cannot be a bare type", pos);
                std::string var_name = word;
                var_name[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(word[0])));
                return make_var_header(word, word, scope.fresh_name(var_name));
            }
        }
        // Relation or boolean application: atom-denoting header.
        try {
            Resolution r = resolve_symbol(text, vocab, pos);
            if (r.kind == Resolution::Kind::Symbol && r.signature->is_predicate()) {
                const Signature& sig = *r.signature;
                std::vector<TermPtr> args;
                std::vector<TypedVar> fresh;
                ExprContext arg_ctx = ctx;
                arg_ctx.fresh = &fresh;
                for (std::size_t i = 0; i < r.args.size(); ++i) {
                    TypedTerm arg = detail::resolve_phrase_term(r.args[i], arg_ctx);
                    if (!detail::types_compatible(vocab, arg.type, sig.arg_types[i]))
                        throw Error(ErrorCode::TypeMismatch,
                                    "argument '" + r.args[i] + "' of '" + text + "' has type '" +
                                        arg.type + "', expected '" + sig.arg_types[i] + "'",
                                    pos);
                    args.push_back(arg.term);
                }
                HeaderExpr h;
                h.kind = HeaderExpr::Kind::Atom;
                h.atom = Formula::mk_pred(sig.canonical, std::move(args));
                h.symbol = sig.canonical;
                h.fresh = std::move(fresh);
                return h;
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::UnresolvedSymbol) throw;
            // fall through to the term grammar for a better error below
        }
    }

    // Term-denoting header: constants, function applications, arithmetic,
    // #Type counts.
    std::vector<TypedVar> fresh;
    ctx.fresh = &fresh;
    TypedTerm tt;
    try {
        tt = parse_term_text(text, ctx);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnresolvedSymbol)
            throw Error(ErrorCode::UnknownHeaderSymbol, std::string(e.what()), pos);
        throw;
    }
    HeaderExpr h;
    h.kind = HeaderExpr::Kind::Term;
    h.term = tt.term;
    h.type = tt.type;
    h.fresh = std::move(fresh);
    if (tt.term->kind == Term::Kind::FuncApp) h.symbol = tt.term->symbol;
    return h;
}

// ---------------------------------------------------------------------------
// Cell entry -> formula at the header's term/atom
// ---------------------------------------------------------------------------

namespace detail {

inline void require_numeric_header(const HeaderExpr& header, const Vocabulary& vocab,
                                   const char* what, const SourcePos& pos) {
    if (!vocab.is_numeric_type(header.type))
        throw Error(ErrorCode::TypeMismatch,
                    std::string(what) + " cell under a header of type '" + header.type + "'", pos);
}

inline void require_compatible(const Vocabulary& vocab, const std::string& header_type,
                               const TypedTerm& value, const SourcePos& pos) {
    if (!types_compatible(vocab, header_type, value.type))
        throw Error(ErrorCode::TypeMismatch,
                    "cell value of type '" + value.type + "' under a header of type '" +
                        header_type + "'",
                    pos);
}

} // namespace detail

// Builds the formula F_ij applied at the header's term: a comparison,
// disequality, membership disjunction, range conjunction, equality, or the
// header atom itself (Yes/No).
inline FormulaPtr cell_to_formula(const CellExpr& cell, const HeaderExpr& header,
                                  const ExprContext& ctx) {
    const Vocabulary& vocab = *ctx.vocab;
    const SourcePos& pos = ctx.pos;

    if (cell.kind == CellExpr::Kind::Irrelevant) return Formula::mk_truth(true);

    if (header.kind == HeaderExpr::Kind::Atom) {
        switch (cell.kind) {
            case CellExpr::Kind::Yes: return header.atom;
            case CellExpr::Kind::No: return Formula::mk_not(header.atom);
            default:
                throw Error(ErrorCode::MalformedExpression,
                            "cell '" + render_cell(cell) +
                                "' under an atom-denoting header; only Yes, No or '-' fit here",
                            pos);
        }
    }

    const TermPtr& subject = header.term;
    switch (cell.kind) {
        case CellExpr::Kind::Compare: {
            TypedTerm value = parse_term_text(cell.text, ctx);
            if (cell.op != CmpOp::Eq && cell.op != CmpOp::Neq) {
                detail::require_numeric_header(header, vocab, "comparison", pos);
                if (!vocab.is_numeric_type(value.type))
                    throw Error(ErrorCode::TypeMismatch,
                                "comparison against non-numeric '" + cell.text + "'", pos);
            } else {
                detail::require_compatible(vocab, header.type, value, pos);
            }
            return Formula::mk_cmp(cell.op, subject, value.term);
        }
        case CellExpr::Kind::Not: {
            TypedTerm value = parse_term_text(cell.text, ctx);
            detail::require_compatible(vocab, header.type, value, pos);
            return Formula::mk_cmp(CmpOp::Neq, subject, value.term);
        }
        case CellExpr::Kind::List: {
            std::vector<FormulaPtr> disjuncts;
            for (const auto& item : cell.items) {
                TypedTerm value = parse_term_text(item, ctx);
                detail::require_compatible(vocab, header.type, value, pos);
                disjuncts.push_back(Formula::mk_cmp(CmpOp::Eq, subject, value.term));
            }
            return Formula::mk_or(std::move(disjuncts));
        }
        case CellExpr::Kind::Range: {
            detail::require_numeric_header(header, vocab, "range", pos);
            TypedTerm lo = parse_term_text(cell.lo, ctx);
            TypedTerm hi = parse_term_text(cell.hi, ctx);
            if (!vocab.is_numeric_type(lo.type) || !vocab.is_numeric_type(hi.type))
                throw Error(ErrorCode::MalformedRange,
                            "range '" + render_cell(cell) + "' has non-numeric bounds", pos);
            if (lo.term->kind == Term::Kind::Lit && hi.term->kind == Term::Kind::Lit &&
                lo.term->lit.num > hi.term->lit.num)
                throw Error(ErrorCode::MalformedRange,
                            "range '" + render_cell(cell) + "' is empty (lo > hi)", pos);
            return Formula::mk_and(
                {Formula::mk_cmp(cell.lo_closed ? CmpOp::Geq : CmpOp::Gt, subject, lo.term),
                 Formula::mk_cmp(cell.hi_closed ? CmpOp::Leq : CmpOp::Lt, subject, hi.term)});
        }
        case CellExpr::Kind::Yes:
        case CellExpr::Kind::No: {
            // Under a term-denoting header, Yes/No may still be a domain
            // element of the header's type (e.g. an enumerated Yes/No type).
            auto it = vocab.auto_constants.find(cell.text);
            if (it == vocab.auto_constants.end() ||
                !detail::types_compatible(vocab, header.type, it->second))
                throw Error(ErrorCode::YesNoOnTerm,
                            "'" + cell.text + "' under term-denoting header of type '" +
                                header.type + "'; Yes/No need an atom-denoting header",
                            pos);
            return Formula::mk_cmp(CmpOp::Eq, subject, Term::mk_elem(cell.text));
        }
        case CellExpr::Kind::Single: {
            TypedTerm value = parse_term_text(cell.text, ctx);
            detail::require_compatible(vocab, header.type, value, pos);
            return Formula::mk_cmp(CmpOp::Eq, subject, value.term);
        }
        case CellExpr::Kind::Irrelevant: return Formula::mk_truth(true);
    }
    return Formula::mk_truth(true);
}

} // namespace cdmn

#endif
