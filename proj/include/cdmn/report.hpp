#ifndef CDMN_REPORT_HPP
#define CDMN_REPORT_HPP

#include <json.hpp>

#include <string>

#include "cdmn/solve.hpp"
#include "cdmn/translate.hpp"

namespace cdmn {

using nlohmann::json;

inline json value_to_json(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Null: return nullptr;
        case Value::Kind::Bool: return v.as_bool();
        case Value::Kind::Int: return v.num;
        case Value::Kind::Elem: return v.elem;
    }
    return nullptr;
}

inline Value value_from_json(const json& j) {
    if (j.is_null()) return Value::null_value();
    if (j.is_boolean()) return Value::boolean(j.get<bool>());
    if (j.is_number_integer()) return Value::integer(j.get<long long>());
    if (j.is_string()) return Value::element(j.get<std::string>());
    throw Error(ErrorCode::MalformedExpression, "unsupported JSON value in structure");
}

// One record per model: every interpreted symbol mapped to its
// interpretation. Functions/constants map argument tuples to values;
// relations list their true tuples; propositions are booleans.
inline json structure_to_json(const Structure& s, const Vocabulary& vocab) {
    json out = json::object();
    for (const auto& [symbol, interp] : s.funcs) {
        if (interp.size() == 1 && interp.begin()->first.empty()) {
            out[symbol] = value_to_json(interp.begin()->second);
            continue;
        }
        json rows = json::array();
        for (const auto& [args, value] : interp) {
            json row;
            row["args"] = json::array();
            for (const auto& a : args) row["args"].push_back(value_to_json(a));
            row["value"] = value_to_json(value);
            rows.push_back(std::move(row));
        }
        out[symbol] = std::move(rows);
    }
    for (const auto& [symbol, tuples] : s.rels) {
        const Signature* sig = vocab.find_symbol(symbol);
        if (sig && sig->arity() == 0) {
            out[symbol] = !tuples.empty();
            continue;
        }
        json rows = json::array();
        for (const auto& args : tuples) {
            json row = json::array();
            for (const auto& a : args) row.push_back(value_to_json(a));
            rows.push_back(std::move(row));
        }
        out[symbol] = std::move(rows);
    }
    return out;
}

// Rebuilds a total structure from a model record, using the vocabulary for
// domains and symbol shapes. Inverse of structure_to_json for structures
// over the same compiled model.
inline Structure structure_from_json(const json& record, const CompiledModel& model) {
    Structure s;
    for (const auto& [type_name, decl] : model.vocabulary.types) {
        if (type_name == kIntType) continue;
        s.domains[type_name] = decl.domain;
    }
    for (const auto& [symbol, interp] : record.items()) {
        const Signature* sig = model.vocabulary.find_symbol(symbol);
        if (!sig)
            throw Error(ErrorCode::UnresolvedSymbol,
                        "JSON record names unknown symbol '" + symbol + "'");
        if (sig->is_predicate()) {
            if (interp.is_boolean()) {
                s.set_prop(symbol, interp.get<bool>());
                continue;
            }
            auto& tuples = s.rels[symbol];
            for (const auto& row : interp) {
                std::vector<Value> args;
                for (const auto& a : row) args.push_back(value_from_json(a));
                if (static_cast<int>(args.size()) != sig->arity())
                    throw Error(ErrorCode::ArityMismatch,
                                "tuple of " + std::to_string(args.size()) + " values for '" +
                                    symbol + "' of arity " + std::to_string(sig->arity()));
                tuples.insert(std::move(args));
            }
        } else {
            if (!interp.is_array()) {
                if (sig->arity() != 0)
                    throw Error(ErrorCode::ArityMismatch,
                                "scalar value for '" + symbol + "' of arity " +
                                    std::to_string(sig->arity()));
                s.funcs[symbol][{}] = value_from_json(interp);
                continue;
            }
            auto& table = s.funcs[symbol];
            for (const auto& row : interp) {
                std::vector<Value> args;
                for (const auto& a : row.at("args")) args.push_back(value_from_json(a));
                if (static_cast<int>(args.size()) != sig->arity())
                    throw Error(ErrorCode::ArityMismatch,
                                "tuple of " + std::to_string(args.size()) + " values for '" +
                                    symbol + "' of arity " + std::to_string(sig->arity()));
                table[std::move(args)] = value_from_json(row.at("value"));
            }
        }
    }
    return s;
}

inline json stats_to_json(const SolveStats& stats) {
    json out;
    out["cells"] = stats.cells;
    out["ground_constraints"] = stats.ground_constraints;
    out["nodes"] = stats.nodes;
    out["elapsed_seconds"] = stats.elapsed_seconds; // excluded from determinism comparisons
    return out;
}

inline json result_to_json(const SolveResult& result, const CompiledModel& model) {
    json out;
    switch (result.status) {
        case SolveResult::Status::Models: out["status"] = "ok"; break;
        case SolveResult::Status::Optimum: out["status"] = "ok"; break;
        case SolveResult::Status::Unsat: out["status"] = "unsat"; break;
        case SolveResult::Status::Error: out["status"] = "error"; break;
    }
    if (result.status == SolveResult::Status::Error) {
        out["error"] = {{"code", error_code_name(result.error)},
                        {"message", result.error_message}};
    } else {
        json models = json::array();
        for (const auto& s : result.models) models.push_back(structure_to_json(s, model.vocabulary));
        out["models"] = std::move(models);
        if (result.status == SolveResult::Status::Optimum) out["objective"] = result.objective;
        if (model.task.kind == Task::Kind::ModelExpand && model.task.count != Task::kAll)
            out["exhausted"] = result.exhausted;
    }
    out["stats"] = stats_to_json(result.stats);
    return out;
}

// Human-readable rendering of one structure: one line per assignment, true
// relation tuples listed as bare atoms.
inline std::string structure_to_text(const Structure& s, const Vocabulary& vocab,
                                     int indent = 2) {
    std::string pad(indent, ' ');
    std::string out;
    for (const auto& [symbol, interp] : s.funcs) {
        for (const auto& [args, value] : interp) {
            out += pad + symbol;
            if (!args.empty()) {
                out += "(";
                for (std::size_t i = 0; i < args.size(); ++i) {
                    if (i) out += ", ";
                    out += args[i].str();
                }
                out += ")";
            }
            out += " = " + value.str() + "\n";
        }
    }
    for (const auto& [symbol, tuples] : s.rels) {
        const Signature* sig = vocab.find_symbol(symbol);
        if (sig && sig->arity() == 0) {
            out += pad + symbol + " = " + (tuples.empty() ? "false" : "true") + "\n";
            continue;
        }
        if (tuples.empty()) {
            out += pad + symbol + " = {}\n";
            continue;
        }
        for (const auto& args : tuples) {
            out += pad + symbol + "(";
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (i) out += ", ";
                out += args[i].str();
            }
            out += ")\n";
        }
    }
    return out;
}

} // namespace cdmn

#endif
