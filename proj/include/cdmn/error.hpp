#ifndef CDMN_ERROR_HPP
#define CDMN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cdmn {

enum class ErrorCode {
    // grid ingestion
    InvalidEncoding,
    UnbalancedQuote,
    EmptyModel,
    UnknownHitPolicy,
    UnknownGlossaryKind,
    AmbiguousTitle,
    MissingSeparator,
    BlankColumn,
    // glossary
    NoArguments,
    DuplicateSymbol,
    UnknownType,
    ClashingDomainElement,
    MissingTypeTable,
    UnresolvedSymbol,
    AmbiguousMatch,
    // cell / header expressions
    MalformedRange,
    MalformedExpression,
    UnknownHeaderSymbol,
    ArityMismatch,
    TypeMismatch,
    VariableRedeclaration,
    YesNoOnTerm,
    // evaluation
    DivisionByZero,
    InexactDivision,
    MinMaxOfEmptySet,
    NullPropagation,
    // translation
    NonValueOutput,
    UnboundOutputVariable,
    DefaultOnConstraintTable,
    MultipleOutputs,
    NonNumericOutput,
    NonNumericCountTarget,
    NonBasicValue,
    IncompleteFunctionData,
    ConflictingData,
    UnknownDomainElement,
    MultipleGoalTables,
    MalformedGoal,
    DataDecisionOverlap,
    // engine
    DomainBlowup,
    EmptyDomain,
    ResourceLimit,
    OracleBlowup,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidEncoding: return "InvalidEncoding";
        case ErrorCode::UnbalancedQuote: return "UnbalancedQuote";
        case ErrorCode::EmptyModel: return "EmptyModel";
        case ErrorCode::UnknownHitPolicy: return "UnknownHitPolicy";
        case ErrorCode::UnknownGlossaryKind: return "UnknownGlossaryKind";
        case ErrorCode::AmbiguousTitle: return "AmbiguousTitle";
        case ErrorCode::MissingSeparator: return "MissingSeparator";
        case ErrorCode::BlankColumn: return "BlankColumn";
        case ErrorCode::NoArguments: return "NoArguments";
        case ErrorCode::DuplicateSymbol: return "DuplicateSymbol";
        case ErrorCode::UnknownType: return "UnknownType";
        case ErrorCode::ClashingDomainElement: return "ClashingDomainElement";
        case ErrorCode::MissingTypeTable: return "MissingTypeTable";
        case ErrorCode::UnresolvedSymbol: return "UnresolvedSymbol";
        case ErrorCode::AmbiguousMatch: return "AmbiguousMatch";
        case ErrorCode::MalformedRange: return "MalformedRange";
        case ErrorCode::MalformedExpression: return "MalformedExpression";
        case ErrorCode::UnknownHeaderSymbol: return "UnknownHeaderSymbol";
        case ErrorCode::ArityMismatch: return "ArityMismatch";
        case ErrorCode::TypeMismatch: return "TypeMismatch";
        case ErrorCode::VariableRedeclaration: return "VariableRedeclaration";
        case ErrorCode::YesNoOnTerm: return "YesNoOnTerm";
        case ErrorCode::DivisionByZero: return "DivisionByZero";
        case ErrorCode::InexactDivision: return "InexactDivision";
        case ErrorCode::MinMaxOfEmptySet: return "MinMaxOfEmptySet";
        case ErrorCode::NullPropagation: return "NullPropagation";
        case ErrorCode::NonValueOutput: return "NonValueOutput";
        case ErrorCode::UnboundOutputVariable: return "UnboundOutputVariable";
        case ErrorCode::DefaultOnConstraintTable: return "DefaultOnConstraintTable";
        case ErrorCode::MultipleOutputs: return "MultipleOutputs";
        case ErrorCode::NonNumericOutput: return "NonNumericOutput";
        case ErrorCode::NonNumericCountTarget: return "NonNumericCountTarget";
        case ErrorCode::NonBasicValue: return "NonBasicValue";
        case ErrorCode::IncompleteFunctionData: return "IncompleteFunctionData";
        case ErrorCode::ConflictingData: return "ConflictingData";
        case ErrorCode::UnknownDomainElement: return "UnknownDomainElement";
        case ErrorCode::MultipleGoalTables: return "MultipleGoalTables";
        case ErrorCode::MalformedGoal: return "MalformedGoal";
        case ErrorCode::DataDecisionOverlap: return "DataDecisionOverlap";
        case ErrorCode::DomainBlowup: return "DomainBlowup";
        case ErrorCode::EmptyDomain: return "EmptyDomain";
        case ErrorCode::ResourceLimit: return "ResourceLimit";
        case ErrorCode::OracleBlowup: return "OracleBlowup";
    }
    return "UnknownError";
}

// Source coordinates of the offending cell. Rows/columns are 1-based
// positions in the workbook file; 0 means "not applicable".
struct SourcePos {
    std::string table;
    int row = 0;
    int col = 0;
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg, SourcePos pos = {})
        : std::runtime_error(format(code, msg, pos)), code_(code), pos_(std::move(pos)) {}

    ErrorCode code() const { return code_; }
    const SourcePos& pos() const { return pos_; }

private:
    static std::string format(ErrorCode code, const std::string& msg, const SourcePos& pos) {
        std::string out = error_code_name(code);
        out += ": ";
        out += msg;
        if (!pos.table.empty() || pos.row > 0) {
            out += " (";
            if (!pos.table.empty()) {
                out += "table '" + pos.table + "'";
                if (pos.row > 0) out += ", ";
            }
            if (pos.row > 0) {
                out += "row " + std::to_string(pos.row);
                if (pos.col > 0) out += ", col " + std::to_string(pos.col);
            }
            out += ")";
        }
        return out;
    }

    ErrorCode code_;
    SourcePos pos_;
};

} // namespace cdmn

#endif
