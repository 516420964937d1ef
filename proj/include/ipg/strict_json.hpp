#pragma once

// Strict-JSON response parsing.
//
// Model responses are required to be a single JSON object and nothing else.
// One concession to reality: a response wrapped in a single markdown code
// fence (``` or ```json) is unwrapped and accepted, but the concession is
// reported so session stats can count how often the instruction was
// ignored. Everything else — prose before or after the object, multiple
// documents, arrays at top level, truncated output — is rejected.

#include <string>

#include "json.hpp"

#include "ipg/errors.hpp"

namespace ipg {

struct StrictJsonResult {
    nlohmann::ordered_json doc;
    bool was_fenced = false;
};

namespace detail {

inline std::string strip_ws(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace detail

inline StrictJsonResult parse_strict_json(const std::string& raw) {
    std::string text = detail::strip_ws(raw);
    StrictJsonResult result;

    if (text.rfind("```", 0) == 0) {
        // Opening fence: "```" optionally followed by a language tag, then a
        // newline. The closing fence must be the final line.
        size_t nl = text.find('\n');
        if (nl == std::string::npos) throw ParseError("unterminated code fence");
        std::string tag = detail::strip_ws(text.substr(3, nl - 3));
        for (char c : tag)
            if (!std::isalpha(static_cast<unsigned char>(c)))
                throw ParseError("malformed code fence tag \"" + tag + "\"");
        if (text.size() < nl + 4 || text.compare(text.size() - 3, 3, "```") != 0)
            throw ParseError("unterminated code fence");
        text = detail::strip_ws(text.substr(nl + 1, text.size() - nl - 4));
        if (text.find("```") != std::string::npos)
            throw ParseError("multiple code fences in response");
        result.was_fenced = true;
    }

    if (text.empty() || text.front() != '{')
        throw ParseError("strict JSON output must be a single object");

    try {
        result.doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("strict JSON parse failed: ") + e.what());
    }
    if (!result.doc.is_object()) throw ParseError("strict JSON output must be a single object");
    return result;
}

} // namespace ipg
