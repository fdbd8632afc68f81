#ifndef CDMN_VOCABULARY_HPP
#define CDMN_VOCABULARY_HPP

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cdmn/error.hpp"
#include "cdmn/fo.hpp"
#include "cdmn/grid.hpp"

namespace cdmn {

// Name of the built-in integer type. It has no finite domain of its own;
// symbols that need one must be typed by a bounded model type or get their
// values from data tables.
inline constexpr const char* kIntType = "Int";

struct TypeDecl {
    std::string name;
    std::vector<Value> domain; // ordered; may grow from data tables when !declared
    bool declared = false;     // domain enumerated in the glossary
    bool is_numeric = false;
};

enum class SymbolKind { Function, Constant, Relation, Boolean };

// A symbol signature extracted from its natural-language description.
// Template slots (written "_") mark argument positions; a slot is any word
// that exactly equals a declared type name (case sensitive).
struct Signature {
    SymbolKind kind = SymbolKind::Constant;
    std::string description;
    std::vector<std::string> template_tokens; // "_" for slots
    std::vector<std::string> arg_types;
    std::string result_type; // functions/constants only
    std::string canonical;   // template joined by '_', slots replaced by their type names

    int arity() const { return static_cast<int>(arg_types.size()); }
    bool is_predicate() const {
        return kind == SymbolKind::Relation || kind == SymbolKind::Boolean;
    }

    // Rendered description: template with slots replaced by arg type names.
    std::string render() const {
        std::string out;
        std::size_t slot = 0;
        for (std::size_t i = 0; i < template_tokens.size(); ++i) {
            if (i) out += ' ';
            out += template_tokens[i] == "_" ? arg_types[slot++] : template_tokens[i];
        }
        return out;
    }

    friend bool operator==(const Signature& a, const Signature& b) {
        return a.kind == b.kind && a.template_tokens == b.template_tokens &&
               a.arg_types == b.arg_types && a.result_type == b.result_type &&
               a.canonical == b.canonical;
    }
};

struct Vocabulary {
    std::map<std::string, TypeDecl> types;
    std::map<std::string, Signature> symbols;        // by canonical name
    std::map<std::string, std::string> auto_constants; // element name -> type name

    bool has_type(const std::string& name) const { return types.count(name) > 0; }

    const TypeDecl& type(const std::string& name) const {
        auto it = types.find(name);
        if (it == types.end())
            throw Error(ErrorCode::UnknownType, "type '" + name + "' is not declared");
        return it->second;
    }

    bool is_numeric_type(const std::string& name) const {
        if (name == kIntType) return true;
        auto it = types.find(name);
        return it != types.end() && it->second.is_numeric;
    }

    const Signature* find_symbol(const std::string& canonical) const {
        auto it = symbols.find(canonical);
        return it == symbols.end() ? nullptr : &it->second;
    }

    // Registers a domain element discovered outside the glossary (data
    // tables). Named elements join auto_constants with the usual clash check.
    void add_domain_element(const std::string& type_name, const Value& v, const SourcePos& pos) {
        TypeDecl& t = types.at(type_name);
        for (const auto& existing : t.domain)
            if (existing == v) return;
        if (v.is_elem()) {
            auto it = auto_constants.find(v.elem);
            if (it != auto_constants.end() && it->second != type_name)
                throw Error(ErrorCode::ClashingDomainElement,
                            "element '" + v.elem + "' already belongs to type '" + it->second + "'",
                            pos);
            auto_constants[v.elem] = type_name;
        }
        t.domain.push_back(v);
    }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        if (a.auto_constants != b.auto_constants || a.symbols != b.symbols) return false;
        if (a.types.size() != b.types.size()) return false;
        for (const auto& [name, decl] : a.types) {
            auto it = b.types.find(name);
            if (it == b.types.end()) return false;
            if (decl.domain != it->second.domain || decl.declared != it->second.declared ||
                decl.is_numeric != it->second.is_numeric)
                return false;
        }
        return true;
    }
};

namespace detail {

inline std::vector<std::string> words(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

inline std::string join_underscore(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += '_';
        out += tokens[i];
    }
    return out;
}

inline bool parse_integer(const std::string& s, long long& out) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (std::size_t k = i; k < s.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
    out = std::stoll(s);
    return true;
}

// "[a..b]" integer range syntax in a glossary Values cell.
inline bool parse_range_domain(const std::string& text, std::vector<Value>& out) {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']') return false;
    std::string inner = text.substr(1, text.size() - 2);
    auto dots = inner.find("..");
    if (dots == std::string::npos) return false;
    long long lo, hi;
    if (!parse_integer(trim(inner.substr(0, dots)), lo) ||
        !parse_integer(trim(inner.substr(dots + 2)), hi))
        return false;
    if (lo > hi)
        throw Error(ErrorCode::MalformedRange,
                    "range [" + std::to_string(lo) + ".." + std::to_string(hi) + "] is empty");
    for (long long v = lo; v <= hi; ++v) out.push_back(Value::integer(v));
    return true;
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::string last = trim(cur);
    if (!last.empty() || !out.empty()) out.push_back(last);
    return out;
}

} // namespace detail

// Extracts the argument slots from a symbol description. Every token exactly
// equal to a declared type name becomes a slot, in left-to-right order; the
// detection is case sensitive. Constants and booleans take their description
// verbatim (no slot detection).
inline Signature parse_signature(const std::string& description,
                                 const std::set<std::string>& type_names, SymbolKind kind) {
    Signature sig;
    sig.kind = kind;
    sig.description = description;
    auto tokens = detail::words(description);
    if (tokens.empty())
        throw Error(ErrorCode::MalformedExpression, "empty symbol description");

    bool detect_slots = kind == SymbolKind::Function || kind == SymbolKind::Relation;
    std::vector<std::string> canonical_tokens;
    for (const auto& tok : tokens) {
        if (detect_slots && type_names.count(tok)) {
            sig.template_tokens.push_back("_");
            sig.arg_types.push_back(tok);
        } else {
            sig.template_tokens.push_back(tok);
        }
        canonical_tokens.push_back(tok);
    }
    sig.canonical = detail::join_underscore(canonical_tokens);

    if (kind == SymbolKind::Relation && sig.arg_types.empty())
        throw Error(ErrorCode::NoArguments,
                    "relation '" + description + "' names no declared type; "
                    "a relation needs at least one argument");
    if (kind == SymbolKind::Function && sig.arg_types.empty())
        throw Error(ErrorCode::NoArguments,
                    "function '" + description + "' names no declared type; "
                    "declare it in the Constant table instead");
    return sig;
}

namespace detail {

inline void check_glossary_header(const TableBlock& block,
                                  const std::vector<std::string>& expected) {
    for (std::size_t i = 0; i < block.header_row.size(); ++i) {
        std::string got = lowercase(trim(block.header_row[i]));
        std::string want = i < expected.size() ? lowercase(expected[i]) : "";
        if (got != want)
            throw Error(ErrorCode::MalformedExpression,
                        "glossary table '" + block.name + "' must have headers " +
                            (expected.size() == 3 ? "Name, Type, Values"
                             : expected.size() == 2 ? "Name, Type"
                                                    : "Name"),
                        {block.name, block.origin_row + 1, static_cast<int>(i) + 1});
    }
    if (block.header_row.size() < expected.size())
        throw Error(ErrorCode::MalformedExpression,
                    "glossary table '" + block.name + "' is missing header columns",
                    {block.name, block.origin_row + 1, 1});
}

inline std::string cell_at(const TableBlock& block, std::size_t row, std::size_t col) {
    if (col >= block.body[row].size()) return "";
    return block.body[row][col];
}

} // namespace detail

// Builds the typed vocabulary from the (at most five) glossary tables.
inline Vocabulary build_vocabulary(const std::vector<TableBlock>& blocks) {
    const TableBlock* table_of[5] = {nullptr, nullptr, nullptr, nullptr, nullptr};
    auto slot_of = [](BlockKind k) -> int {
        switch (k) {
            case BlockKind::GlossaryType: return 0;
            case BlockKind::GlossaryFunction: return 1;
            case BlockKind::GlossaryConstant: return 2;
            case BlockKind::GlossaryRelation: return 3;
            case BlockKind::GlossaryBoolean: return 4;
            default: return -1;
        }
    };
    for (const auto& b : blocks) {
        int s = slot_of(b.kind);
        if (s < 0) continue;
        if (table_of[s])
            throw Error(ErrorCode::DuplicateSymbol,
                        "more than one '" + b.name + "' glossary table",
                        {b.name, b.origin_row, 1});
        table_of[s] = &b;
    }
    if (!table_of[0])
        throw Error(ErrorCode::MissingTypeTable, "every model needs a Glossary Type table");

    Vocabulary vocab;
    vocab.types[kIntType] = TypeDecl{kIntType, {}, false, true};

    // Type table: Name, Type, Values.
    {
        const TableBlock& b = *table_of[0];
        detail::check_glossary_header(b, {"Name", "Type", "Values"});
        for (std::size_t r = 0; r < b.body.size(); ++r) {
            SourcePos pos{b.name, b.origin_row + 2 + static_cast<int>(r), 1};
            std::string name = detail::cell_at(b, r, 0);
            std::string kind_text = detail::lowercase(detail::cell_at(b, r, 1));
            std::string values_text = detail::cell_at(b, r, 2);
            if (name.empty())
                throw Error(ErrorCode::MalformedExpression, "type row without a name", pos);
            if (name != kIntType && !std::isupper(static_cast<unsigned char>(name[0])))
                throw Error(ErrorCode::MalformedExpression,
                            "type name '" + name + "' must start with an uppercase letter", pos);
            if (vocab.types.count(name))
                throw Error(ErrorCode::DuplicateSymbol, "type '" + name + "' declared twice", pos);

            TypeDecl decl;
            decl.name = name;
            bool numeric_kind;
            if (kind_text.empty() || kind_text == "string" || kind_text == "text")
                numeric_kind = false;
            else if (kind_text == "int" || kind_text == "integer" || kind_text == "number")
                numeric_kind = true;
            else if (kind_text == "float" || kind_text == "real")
                throw Error(ErrorCode::NonBasicValue,
                            "floating-point types are not supported; use int", pos);
            else
                throw Error(ErrorCode::MalformedExpression,
                            "unknown type kind '" + kind_text + "' (use string or int)", pos);

            if (!values_text.empty()) {
                decl.declared = true;
                if (!detail::parse_range_domain(values_text, decl.domain)) {
                    for (const auto& item : detail::split_list(values_text)) {
                        if (item.empty())
                            throw Error(ErrorCode::MalformedExpression,
                                        "empty entry in the Values list of type '" + name + "'",
                                        pos);
                        long long n;
                        Value v = detail::parse_integer(item, n) ? Value::integer(n)
                                                                 : Value::element(item);
                        for (const auto& existing : decl.domain)
                            if (existing == v)
                                throw Error(ErrorCode::ClashingDomainElement,
                                            "element '" + item + "' listed twice in type '" +
                                                name + "'",
                                            pos);
                        decl.domain.push_back(v);
                    }
                }
                bool all_int = true, any_int = false;
                for (const auto& v : decl.domain) {
                    all_int &= v.is_int();
                    any_int |= v.is_int();
                }
                if (any_int && !all_int)
                    throw Error(ErrorCode::TypeMismatch,
                                "type '" + name + "' mixes numbers and named elements", pos);
                decl.is_numeric = all_int && !decl.domain.empty();
                if (numeric_kind && !decl.is_numeric)
                    throw Error(ErrorCode::TypeMismatch,
                                "type '" + name + "' is declared int but lists named elements",
                                pos);
            } else {
                decl.is_numeric = numeric_kind;
            }
            vocab.types[name] = decl;

            for (const auto& v : decl.domain) {
                if (!v.is_elem()) continue;
                auto it = vocab.auto_constants.find(v.elem);
                if (it != vocab.auto_constants.end())
                    throw Error(ErrorCode::ClashingDomainElement,
                                "element '" + v.elem + "' appears in both type '" + it->second +
                                    "' and type '" + name + "'",
                                pos);
                vocab.auto_constants[v.elem] = name;
            }
        }
    }

    std::set<std::string> type_names;
    for (const auto& [name, _] : vocab.types) type_names.insert(name);

    auto add_symbol = [&](Signature sig, const SourcePos& pos) {
        for (const auto& t : sig.arg_types) vocab.type(t);
        if (!sig.result_type.empty()) vocab.type(sig.result_type);
        if (vocab.symbols.count(sig.canonical))
            throw Error(ErrorCode::DuplicateSymbol,
                        "symbol '" + sig.description + "' collides with an existing symbol", pos);
        if (sig.arity() == 0 && vocab.auto_constants.count(sig.canonical))
            throw Error(ErrorCode::DuplicateSymbol,
                        "symbol '" + sig.description + "' collides with domain element '" +
                            sig.canonical + "'",
                        pos);
        vocab.symbols[sig.canonical] = std::move(sig);
    };

    struct TableSpec {
        int slot;
        SymbolKind kind;
        std::vector<std::string> headers;
    };
    const TableSpec specs[] = {
        {1, SymbolKind::Function, {"Name", "Type"}},
        {2, SymbolKind::Constant, {"Name", "Type"}},
        {3, SymbolKind::Relation, {"Name"}},
        {4, SymbolKind::Boolean, {"Name"}},
    };
    for (const auto& spec : specs) {
        if (!table_of[spec.slot]) continue;
        const TableBlock& b = *table_of[spec.slot];
        detail::check_glossary_header(b, spec.headers);
        for (std::size_t r = 0; r < b.body.size(); ++r) {
            SourcePos pos{b.name, b.origin_row + 2 + static_cast<int>(r), 1};
            std::string name = detail::cell_at(b, r, 0);
            if (name.empty())
                throw Error(ErrorCode::MalformedExpression, "symbol row without a name", pos);
            Signature sig = parse_signature(name, type_names, spec.kind);
            if (spec.kind == SymbolKind::Function || spec.kind == SymbolKind::Constant) {
                std::string result = detail::cell_at(b, r, 1);
                if (result.empty())
                    throw Error(ErrorCode::UnknownType,
                                "symbol '" + name + "' is missing its result type", pos);
                sig.result_type = result;
            }
            add_symbol(std::move(sig), pos);
        }
    }
    return vocab;
}

// ---------------------------------------------------------------------------
// Phrase resolution against symbol templates
// ---------------------------------------------------------------------------

struct Resolution {
    enum class Kind { Symbol, AutoConstant };
    Kind kind = Kind::Symbol;
    const Signature* signature = nullptr; // Symbol
    std::vector<std::string> args;        // Symbol: captured argument phrases
    std::string element;                  // AutoConstant
    std::string element_type;             // AutoConstant
};

namespace detail {

// Aligns phrase tokens against a template; slots capture one or more tokens,
// earlier slots capturing as many as possible (leftmost-longest).
inline bool match_template(const std::vector<std::string>& tokens,
                           const std::vector<std::string>& tmpl, std::size_t ti, std::size_t pi,
                           std::vector<std::pair<std::size_t, std::size_t>>& captures) {
    if (pi == tmpl.size()) return ti == tokens.size();
    if (tmpl[pi] != "_") {
        if (ti < tokens.size() && tokens[ti] == tmpl[pi])
            return match_template(tokens, tmpl, ti + 1, pi + 1, captures);
        return false;
    }
    for (std::size_t len = tokens.size() - ti; len >= 1; --len) {
        captures.emplace_back(ti, len);
        if (match_template(tokens, tmpl, ti + len, pi + 1, captures)) return true;
        captures.pop_back();
    }
    return false;
}

} // namespace detail

// Matches a phrase against the vocabulary: bare constants, booleans and
// auto-constants first (full-phrase names), then symbol templates with
// argument capture. Longest template wins; an equal-length tie is an error.
inline Resolution resolve_symbol(const std::string& phrase, const Vocabulary& vocab,
                                 SourcePos pos = {}) {
    auto tokens = detail::words(phrase);
    if (tokens.empty())
        throw Error(ErrorCode::UnresolvedSymbol, "empty phrase", pos);

    // Whole-phrase matches: declared 0-ary symbols and auto-constants.
    std::string joined = detail::join_underscore(tokens);
    if (const Signature* sig = vocab.find_symbol(joined); sig && sig->arity() == 0) {
        Resolution r;
        r.kind = Resolution::Kind::Symbol;
        r.signature = sig;
        return r;
    }
    if (tokens.size() == 1) {
        auto it = vocab.auto_constants.find(tokens[0]);
        if (it != vocab.auto_constants.end()) {
            Resolution r;
            r.kind = Resolution::Kind::AutoConstant;
            r.element = tokens[0];
            r.element_type = it->second;
            return r;
        }
    }

    const Signature* best = nullptr;
    std::vector<std::pair<std::size_t, std::size_t>> best_captures;
    bool tie = false;
    for (const auto& [canonical, sig] : vocab.symbols) {
        if (sig.arity() == 0) continue;
        std::vector<std::pair<std::size_t, std::size_t>> captures;
        if (!detail::match_template(tokens, sig.template_tokens, 0, 0, captures)) continue;
        if (!best || sig.template_tokens.size() > best->template_tokens.size()) {
            best = &sig;
            best_captures = captures;
            tie = false;
        } else if (sig.template_tokens.size() == best->template_tokens.size()) {
            tie = true;
        }
    }
    if (!best)
        throw Error(ErrorCode::UnresolvedSymbol,
                    "cannot resolve '" + phrase + "' against the glossary", pos);
    if (tie)
        throw Error(ErrorCode::AmbiguousMatch,
                    "phrase '" + phrase + "' matches more than one symbol template", pos);

    Resolution r;
    r.kind = Resolution::Kind::Symbol;
    r.signature = best;
    for (const auto& [start, len] : best_captures) {
        std::string arg;
        for (std::size_t i = 0; i < len; ++i) {
            if (i) arg += ' ';
            arg += tokens[start + i];
        }
        r.args.push_back(arg);
    }
    return r;
}

} // namespace cdmn

#endif
