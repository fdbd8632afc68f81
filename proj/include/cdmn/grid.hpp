#ifndef CDMN_GRID_HPP
#define CDMN_GRID_HPP

#include <algorithm>
#include <cctype>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cdmn/error.hpp"

namespace cdmn {

// A workbook is a sequence of table blocks separated by blank lines.
// Cells follow RFC-4180 quoting; unquoted cells are trimmed.

struct RawGrid {
    std::vector<std::vector<std::string>> rows;

    bool row_blank(std::size_t i) const {
        for (const auto& c : rows[i])
            if (!c.empty()) return false;
        return true;
    }
};

enum class BlockKind {
    GlossaryType,
    GlossaryFunction,
    GlossaryConstant,
    GlossaryRelation,
    GlossaryBoolean,
    Decision,
    Constraint,
    Data,
    Goal,
};

enum class HitPolicy { U, A, F, EStar, CPlus, CLess, CGreater, CCount };

inline const char* hit_policy_token(HitPolicy p) {
    switch (p) {
        case HitPolicy::U: return "U";
        case HitPolicy::A: return "A";
        case HitPolicy::F: return "F";
        case HitPolicy::EStar: return "E*";
        case HitPolicy::CPlus: return "C+";
        case HitPolicy::CLess: return "C<";
        case HitPolicy::CGreater: return "C>";
        case HitPolicy::CCount: return "C#";
    }
    return "?";
}

struct TableBlock {
    std::string name;
    BlockKind kind = BlockKind::Decision;
    std::optional<HitPolicy> hit_policy;
    std::vector<std::string> header_row;
    std::vector<std::vector<std::string>> body;
    int n_inputs = 0;
    int n_outputs = 0;
    int sep_col = -1; // index of the "||" cell in header_row, -1 when none
    std::vector<std::string> default_values; // per output column, from "default=..." title cell
    bool has_defaults = false;
    int origin_row = 0; // 1-based row of the title in the workbook file

    bool is_glossary() const {
        return kind == BlockKind::GlossaryType || kind == BlockKind::GlossaryFunction ||
               kind == BlockKind::GlossaryConstant || kind == BlockKind::GlossaryRelation ||
               kind == BlockKind::GlossaryBoolean;
    }

    // Column index (into header_row/body rows) of the i-th input / output.
    int input_col(int i) const { return i; }
    int output_col(int k) const { return sep_col + 1 + k; }

    friend bool operator==(const TableBlock& a, const TableBlock& b) {
        return a.name == b.name && a.kind == b.kind && a.hit_policy == b.hit_policy &&
               a.header_row == b.header_row && a.body == b.body && a.n_inputs == b.n_inputs &&
               a.n_outputs == b.n_outputs && a.default_values == b.default_values &&
               a.has_defaults == b.has_defaults;
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = s[i];
        std::size_t len;
        if (c < 0x80) len = 1;
        else if ((c & 0xE0) == 0xC0) len = 2;
        else if ((c & 0xF0) == 0xE0) len = 3;
        else if ((c & 0xF8) == 0xF0) len = 4;
        else return false;
        if (i + len > s.size()) return false;
        for (std::size_t k = 1; k < len; ++k)
            if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
        if (len == 2 && c < 0xC2) return false; // overlong
        i += len;
    }
    return true;
}

inline std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace detail

inline RawGrid load_grid(std::string_view text) {
    if (!detail::valid_utf8(text))
        throw Error(ErrorCode::InvalidEncoding, "input is not valid UTF-8");

    RawGrid grid;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;       // inside a quoted cell
    bool cell_was_quoted = false;
    bool any_content = false;  // current row has at least one cell boundary

    auto flush_cell = [&] {
        row.push_back(cell_was_quoted ? cell : detail::trim(cell));
        cell.clear();
        cell_was_quoted = false;
    };
    auto flush_row = [&] {
        flush_cell();
        grid.rows.push_back(std::move(row));
        row.clear();
        any_content = false;
    };

    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
                continue;
            }
            cell += c;
            ++i;
            continue;
        }
        switch (c) {
            case '"':
                if (detail::trim(cell).empty() && !cell_was_quoted) {
                    quoted = true;
                    cell_was_quoted = true;
                    cell.clear();
                } else {
                    cell += c; // interior quote in an unquoted cell, keep verbatim
                }
                any_content = true;
                ++i;
                break;
            case ',':
                flush_cell();
                any_content = true;
                ++i;
                break;
            case '\r':
                ++i;
                break;
            case '\n':
                flush_row();
                ++i;
                break;
            default:
                cell += c;
                any_content = true;
                ++i;
                break;
        }
    }
    if (quoted)
        throw Error(ErrorCode::UnbalancedQuote,
                    "quoted cell never closes (row " + std::to_string(grid.rows.size() + 1) + ")");
    if (any_content || !row.empty() || !cell.empty()) {
        if (any_content) flush_row();
    }
    return grid;
}

inline RawGrid load_grid(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_grid(std::string_view(buf.str()));
}

inline std::pair<BlockKind, std::optional<HitPolicy>>
classify_block(const std::vector<std::string>& title_row) {
    if (title_row.empty() || title_row[0].empty())
        throw Error(ErrorCode::MalformedExpression, "block title cell is empty");

    const std::string& name = title_row[0];
    const std::string policy_cell = title_row.size() > 1 ? title_row[1] : std::string();

    // Glossary tables: "Glossary <Kind>"
    std::istringstream words(name);
    std::string first, second;
    words >> first >> second;
    if (detail::lowercase(first) == "glossary") {
        std::string kind = detail::lowercase(second);
        if (!kind.empty() && kind.back() == 's') kind.pop_back();
        if (kind == "type") return {BlockKind::GlossaryType, std::nullopt};
        if (kind == "function") return {BlockKind::GlossaryFunction, std::nullopt};
        if (kind == "constant") return {BlockKind::GlossaryConstant, std::nullopt};
        if (kind == "relation") return {BlockKind::GlossaryRelation, std::nullopt};
        if (kind == "boolean") return {BlockKind::GlossaryBoolean, std::nullopt};
        throw Error(ErrorCode::UnknownGlossaryKind,
                    "glossary table must name Type, Function, Constant, Relation or Boolean, got '" +
                        name + "'");
    }

    if (detail::lowercase(name) == "goal") return {BlockKind::Goal, std::nullopt};

    auto parse_policy = [](const std::string& tok) -> std::optional<HitPolicy> {
        if (tok == "U") return HitPolicy::U;
        if (tok == "A") return HitPolicy::A;
        if (tok == "F") return HitPolicy::F;
        if (tok == "E*") return HitPolicy::EStar;
        if (tok == "C+") return HitPolicy::CPlus;
        if (tok == "C<") return HitPolicy::CLess;
        if (tok == "C>") return HitPolicy::CGreater;
        if (tok == "C#") return HitPolicy::CCount;
        return std::nullopt;
    };

    bool is_data = detail::lowercase(name).find("data table") != std::string::npos;
    if (is_data) {
        if (!policy_cell.empty() && parse_policy(policy_cell))
            throw Error(ErrorCode::AmbiguousTitle,
                        "table '" + name + "' has both 'data table' in its name and hit policy '" +
                            policy_cell + "'");
        return {BlockKind::Data, std::nullopt};
    }

    if (policy_cell == "C")
        throw Error(ErrorCode::UnknownHitPolicy,
                    "the C (collect-to-list) hit policy is not supported; "
                    "use C+, C<, C> or C#, or model the list with a relation",
                    {name, 0, 2});
    auto policy = parse_policy(policy_cell);
    if (!policy)
        throw Error(ErrorCode::UnknownHitPolicy,
                    policy_cell.empty()
                        ? "table '" + name + "' has no hit policy and is not a glossary/data/goal table"
                        : "unknown hit policy '" + policy_cell + "' on table '" + name + "'",
                    {name, 0, 2});
    if (*policy == HitPolicy::EStar) return {BlockKind::Constraint, *policy};
    return {BlockKind::Decision, *policy};
}

namespace detail {

inline void split_columns(TableBlock& block, int width) {
    int sep = -1;
    for (int c = 0; c < static_cast<int>(block.header_row.size()); ++c) {
        if (block.header_row[c] == "||") {
            if (sep >= 0)
                throw Error(ErrorCode::MalformedExpression, "more than one '||' separator",
                            {block.name, block.origin_row + 1, c + 1});
            sep = c;
        }
    }
    if (sep < 0)
        throw Error(ErrorCode::MissingSeparator,
                    "header row needs a '||' cell between inputs and outputs",
                    {block.name, block.origin_row + 1, 0});
    block.sep_col = sep;
    block.n_inputs = sep;
    block.n_outputs = width - sep - 1;
    if (block.n_outputs < 1)
        throw Error(ErrorCode::MissingSeparator, "no output columns after '||'",
                    {block.name, block.origin_row + 1, sep + 1});
    for (int c = 0; c < width; ++c) {
        if (c == sep) continue;
        if (block.header_row[c].empty())
            throw Error(ErrorCode::BlankColumn, "blank column header inside table",
                        {block.name, block.origin_row + 1, c + 1});
    }
    for (std::size_t r = 0; r < block.body.size(); ++r) {
        const std::string& at_sep = block.body[r][sep];
        if (!at_sep.empty() && at_sep != "||")
            throw Error(ErrorCode::MalformedExpression,
                        "unexpected cell '" + at_sep + "' in separator column",
                        {block.name, block.origin_row + 2 + static_cast<int>(r), sep + 1});
        block.body[r][sep].clear();
    }
}

inline void parse_defaults(TableBlock& block, const std::vector<std::string>& title_row) {
    for (std::size_t c = 2; c < title_row.size(); ++c) {
        const std::string& cell = title_row[c];
        if (cell.empty()) continue;
        if (cell.rfind("default=", 0) != 0)
            throw Error(ErrorCode::MalformedExpression,
                        "unexpected title cell '" + cell + "' (expected 'default=<values>')",
                        {block.name, block.origin_row, static_cast<int>(c) + 1});
        std::string values = cell.substr(8);
        std::vector<std::string> parts;
        std::string cur;
        for (char ch : values) {
            if (ch == ',') {
                parts.push_back(trim(cur));
                cur.clear();
            } else {
                cur += ch;
            }
        }
        parts.push_back(trim(cur));
        block.default_values = std::move(parts);
        block.has_defaults = true;
    }
}

} // namespace detail

inline std::vector<TableBlock> segment_blocks(const RawGrid& grid) {
    std::vector<TableBlock> blocks;
    std::size_t n = grid.rows.size();
    std::size_t i = 0;
    while (i < n) {
        while (i < n && grid.row_blank(i)) ++i;
        if (i >= n) break;
        std::size_t start = i;
        while (i < n && !grid.row_blank(i)) ++i;
        std::vector<std::vector<std::string>> run(grid.rows.begin() + start, grid.rows.begin() + i);

        std::size_t width = 0;
        for (const auto& r : run) width = std::max(width, r.size());
        for (auto& r : run) r.resize(width);

        TableBlock block;
        block.origin_row = static_cast<int>(start) + 1;
        auto [kind, policy] = classify_block(run[0]);
        block.kind = kind;
        block.hit_policy = policy;
        block.name = run[0][0];

        if (kind == BlockKind::Goal) {
            // Goal tables have no header row: title + exactly one body row.
            if (run.size() != 2)
                throw Error(ErrorCode::MalformedGoal,
                            "goal table must have exactly one body row",
                            {block.name, block.origin_row, 1});
            block.body.assign(run.begin() + 1, run.end());
        } else {
            if (run.size() < 2)
                throw Error(ErrorCode::MalformedExpression, "table has no header row",
                            {block.name, block.origin_row, 1});
            block.header_row = run[1];
            block.body.assign(run.begin() + 2, run.end());
            if (kind == BlockKind::Decision || kind == BlockKind::Constraint ||
                kind == BlockKind::Data) {
                detail::split_columns(block, static_cast<int>(width));
                detail::parse_defaults(block, run[0]);
            }
        }
        blocks.push_back(std::move(block));
    }
    if (blocks.empty())
        throw Error(ErrorCode::EmptyModel, "no table blocks found in the workbook");
    return blocks;
}

inline std::vector<TableBlock> segment_blocks(std::string_view text) {
    return segment_blocks(load_grid(text));
}

namespace detail {

inline std::string csv_escape(const std::string& cell) {
    bool needs_quotes = cell.find_first_of(",\"\n\r") != std::string::npos ||
                        (!cell.empty() && (std::isspace(static_cast<unsigned char>(cell.front())) ||
                                           std::isspace(static_cast<unsigned char>(cell.back()))));
    if (!needs_quotes) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline void append_csv_row(std::string& out, const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        out += csv_escape(row[c]);
    }
    out += '\n';
}

} // namespace detail

// Re-serialize one block in the workbook format. Loading the result yields an
// equal block (round-trip at block level).
inline std::string render_block(const TableBlock& block) {
    std::string out;
    std::vector<std::string> title{block.name};
    if (block.hit_policy) title.push_back(hit_policy_token(*block.hit_policy));
    if (block.has_defaults) {
        std::string joined;
        for (std::size_t i = 0; i < block.default_values.size(); ++i) {
            if (i) joined += ", ";
            joined += block.default_values[i];
        }
        title.push_back("default=" + joined);
    }
    detail::append_csv_row(out, title);
    if (!block.header_row.empty()) detail::append_csv_row(out, block.header_row);
    for (const auto& row : block.body) detail::append_csv_row(out, row);
    return out;
}

} // namespace cdmn

#endif
