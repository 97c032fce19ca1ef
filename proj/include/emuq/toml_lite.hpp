#pragma once

#include <cctype>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emuq/errors.hpp"

namespace emuq {

/// Minimal TOML-style reader covering the configuration grammar:
/// [table] and [table.sub] headers, [[array.of.tables]] entries, and
/// key = value lines with string / number / boolean / flat-array values.
/// Parses into an ordered JSON tree so declaration order is preserved.
namespace toml_lite {

using json = nlohmann::ordered_json;

namespace detail {

inline std::string strip(std::string_view sv) {
    const auto b = sv.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = sv.find_last_not_of(" \t\r");
    return std::string(sv.substr(b, e - b + 1));
}

/// Removes a trailing comment that is not inside a quoted string.
inline std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

inline std::vector<std::string> split_path(const std::string& dotted, std::size_t line_no) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto dot = dotted.find('.', start);
        const std::string part =
            strip(dot == std::string::npos ? dotted.substr(start) : dotted.substr(start, dot - start));
        if (part.empty())
            throw io_error("config: empty table-name segment at line " + std::to_string(line_no));
        parts.push_back(part);
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return parts;
}

inline json parse_scalar(const std::string& text, std::size_t line_no) {
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"')
        return json(text.substr(1, text.size() - 2));
    if (text == "true") return json(true);
    if (text == "false") return json(false);
    try {
        std::size_t used = 0;
        if (text.find_first_of(".eE") != std::string::npos ||
            text.find("inf") != std::string::npos || text.find("nan") != std::string::npos) {
            const double v = std::stod(text, &used);
            if (used == text.size()) return json(v);
        } else {
            const long long v = std::stoll(text, &used, 10);
            if (used == text.size()) return json(v);
            const double d = std::stod(text, &used);
            if (used == text.size()) return json(d);
        }
    } catch (const std::exception&) {
    }
    throw io_error("config: cannot parse value '" + text + "' at line " +
                   std::to_string(line_no));
}

inline json parse_value(const std::string& text, std::size_t line_no) {
    if (!text.empty() && text.front() == '[') {
        if (text.back() != ']')
            throw io_error("config: unterminated array at line " + std::to_string(line_no));
        json arr = json::array();
        const std::string inner = strip(std::string_view(text).substr(1, text.size() - 2));
        if (inner.empty()) return arr;
        std::size_t start = 0;
        bool in_string = false;
        for (std::size_t i = 0; i <= inner.size(); ++i) {
            if (i < inner.size() && inner[i] == '"') in_string = !in_string;
            if (i == inner.size() || (inner[i] == ',' && !in_string)) {
                arr.push_back(parse_scalar(strip(std::string_view(inner).substr(start, i - start)),
                                           line_no));
                start = i + 1;
            }
        }
        return arr;
    }
    return parse_scalar(text, line_no);
}

}  // namespace detail

inline json parse(std::istream& in) {
    json root = json::object();
    json* current = &root;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::strip(detail::strip_comment(raw));
        if (line.empty()) continue;

        if (line.front() == '[') {
            const bool is_array = line.size() > 1 && line[1] == '[';
            const std::string closer = is_array ? "]]" : "]";
            if (line.substr(line.size() - closer.size()) != closer)
                throw io_error("config: malformed table header at line " + std::to_string(line_no));
            const std::string dotted = line.substr(is_array ? 2 : 1,
                                                   line.size() - 2 * (is_array ? 2 : 1));
            const auto path = detail::split_path(dotted, line_no);
            json* node = &root;
            for (std::size_t d = 0; d < path.size(); ++d) {
                const bool last = d + 1 == path.size();
                json& slot = (*node)[path[d]];
                if (last && is_array) {
                    if (slot.is_null()) slot = json::array();
                    if (!slot.is_array())
                        throw io_error("config: '" + path[d] + "' redefined as array of tables at line " +
                                       std::to_string(line_no));
                    slot.push_back(json::object());
                    node = &slot.back();
                } else {
                    if (slot.is_null()) slot = json::object();
                    if (slot.is_array()) {
                        if (slot.empty()) slot.push_back(json::object());
                        node = &slot.back();
                    } else if (slot.is_object()) {
                        node = &slot;
                    } else {
                        throw io_error("config: '" + path[d] + "' is not a table at line " +
                                       std::to_string(line_no));
                    }
                }
            }
            current = node;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw io_error("config: expected 'key = value' at line " + std::to_string(line_no));
        const std::string key = detail::strip(std::string_view(line).substr(0, eq));
        const std::string value = detail::strip(std::string_view(line).substr(eq + 1));
        if (key.empty() || value.empty())
            throw io_error("config: expected 'key = value' at line " + std::to_string(line_no));
        (*current)[key] = detail::parse_value(value, line_no);
    }
    return root;
}

}  // namespace toml_lite

}  // namespace emuq
