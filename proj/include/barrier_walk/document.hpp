#pragma once

// JSON graph documents and state addresses.
//
//   {
//     "barriers":   [{"id": 0, "stay": 0.1, "absorb": 0.2,
//                     "moves": [{"to_barrier": 1, "prob": 0.5}],
//                     "half_line_moves": [{"label": 1, "prob": 0.2}]}],
//     "intervals":  [{"from": 0, "to": 1, "interior_states": 3, "p": 0.4, "q": 0.4}],
//     "half_lines": [{"owner": 0, "label": 1, "p": 0.3, "q": 0.5}],
//     "start": {"kind": "interval", "from": 0, "to": 1, "position": 2}
//   }
//
// Unknown keys anywhere are rejected.

#include <barrier_walk/error.hpp>
#include <barrier_walk/graph.hpp>

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace barrier_walk {

struct GraphDocument {
    WalkGraph graph;
    StartPosition start = AtBarrier{0};

    bool operator==(const GraphDocument&) const = default;
};

namespace doc_detail {

using nlohmann::json;

inline void only_keys(const json& object, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!object.is_object()) {
        throw Error(ErrorCode::Parse, std::string(where) + " must be an object");
    }
    for (const auto& [key, _] : object.items()) {
        bool known = false;
        for (auto name : allowed) {
            known = known || key == name;
        }
        if (!known) {
            throw Error(ErrorCode::Parse, "unknown key \"" + key + "\" in " + std::string(where));
        }
    }
}

inline const json& field(const json& object, const char* key, std::string_view where) {
    auto it = object.find(key);
    if (it == object.end()) {
        throw Error(ErrorCode::Parse, std::string(where) + " is missing \"" + key + "\"");
    }
    return *it;
}

inline double number(const json& object, const char* key, std::string_view where) {
    const auto& value = field(object, key, where);
    if (!value.is_number()) {
        throw Error(ErrorCode::Parse, std::string(where) + "." + key + " must be a number");
    }
    return value.get<double>();
}

inline int integer(const json& object, const char* key, std::string_view where) {
    const auto& value = field(object, key, where);
    if (!value.is_number_integer()) {
        throw Error(ErrorCode::Parse, std::string(where) + "." + key + " must be an integer");
    }
    return value.get<int>();
}

inline const json& array(const json& object, const char* key, std::string_view where) {
    const auto& value = field(object, key, where);
    if (!value.is_array()) {
        throw Error(ErrorCode::Parse, std::string(where) + "." + key + " must be an array");
    }
    return value;
}

inline std::string location(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

inline Position parse_start(const json& start) {
    const std::string where = "start";
    const auto& kind = field(start, "kind", where);
    if (!kind.is_string()) {
        throw Error(ErrorCode::Parse, "start.kind must be a string");
    }
    const auto name = kind.get<std::string>();
    if (name == "barrier") {
        only_keys(start, where, {"kind", "id"});
        return AtBarrier{integer(start, "id", where)};
    }
    if (name == "interval") {
        only_keys(start, where, {"kind", "from", "to", "position"});
        return OnInterval{integer(start, "from", where), integer(start, "to", where),
                          integer(start, "position", where)};
    }
    if (name == "half_line") {
        only_keys(start, where, {"kind", "owner", "label", "position"});
        return OnHalfLine{integer(start, "owner", where), integer(start, "label", where),
                          integer(start, "position", where)};
    }
    throw Error(ErrorCode::Parse, "start.kind must be barrier, interval or half_line");
}

inline json start_json(const Position& start) {
    if (const auto* at = std::get_if<AtBarrier>(&start)) {
        return {{"kind", "barrier"}, {"id", at->id}};
    }
    if (const auto* on = std::get_if<OnInterval>(&start)) {
        return {{"kind", "interval"}, {"from", on->from}, {"to", on->to}, {"position", on->position}};
    }
    const auto& on = std::get<OnHalfLine>(start);
    return {{"kind", "half_line"}, {"owner", on.owner}, {"label", on.label}, {"position", on.position}};
}

} // namespace doc_detail

/// Parses a document; structural problems throw ParseError, model rules are
/// left to validate().
inline GraphDocument parse_document(std::string_view text) {
    using doc_detail::json;
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw Error(ErrorCode::Parse, "malformed JSON at " + doc_detail::location(text, byte));
    }

    doc_detail::only_keys(root, "document", {"barriers", "intervals", "half_lines", "start"});
    GraphDocument doc;
    for (const auto& b : doc_detail::array(root, "barriers", "document")) {
        const std::string where = "barrier";
        doc_detail::only_keys(b, where, {"id", "stay", "absorb", "moves", "half_line_moves"});
        Barrier barrier;
        barrier.id = doc_detail::integer(b, "id", where);
        const std::string named = "barrier " + std::to_string(barrier.id);
        barrier.stay = doc_detail::number(b, "stay", named);
        barrier.absorb = doc_detail::number(b, "absorb", named);
        if (b.contains("moves")) {
            for (const auto& m : doc_detail::array(b, "moves", named)) {
                doc_detail::only_keys(m, named + " move", {"to_barrier", "prob"});
                const int target = doc_detail::integer(m, "to_barrier", named);
                if (!barrier.interval_moves.emplace(target, doc_detail::number(m, "prob", named)).second) {
                    throw Error(ErrorCode::Parse, named + " lists barrier " + std::to_string(target) + " twice");
                }
            }
        }
        if (b.contains("half_line_moves")) {
            for (const auto& m : doc_detail::array(b, "half_line_moves", named)) {
                doc_detail::only_keys(m, named + " half-line move", {"label", "prob"});
                const int label = doc_detail::integer(m, "label", named);
                if (!barrier.halfline_moves.emplace(label, doc_detail::number(m, "prob", named)).second) {
                    throw Error(ErrorCode::Parse, named + " lists half-line " + std::to_string(label) + " twice");
                }
            }
        }
        doc.graph.barriers.push_back(std::move(barrier));
    }
    if (root.contains("intervals")) {
        for (const auto& e : doc_detail::array(root, "intervals", "document")) {
            const std::string where = "interval";
            doc_detail::only_keys(e, where, {"from", "to", "interior_states", "p", "q"});
            doc.graph.intervals.push_back({doc_detail::integer(e, "from", where), doc_detail::integer(e, "to", where),
                                           doc_detail::integer(e, "interior_states", where),
                                           doc_detail::number(e, "p", where), doc_detail::number(e, "q", where)});
        }
    }
    if (root.contains("half_lines")) {
        for (const auto& h : doc_detail::array(root, "half_lines", "document")) {
            const std::string where = "half_line";
            doc_detail::only_keys(h, where, {"owner", "label", "p", "q"});
            doc.graph.halflines.push_back({doc_detail::integer(h, "owner", where),
                                           doc_detail::integer(h, "label", where), doc_detail::number(h, "p", where),
                                           doc_detail::number(h, "q", where)});
        }
    }
    doc.start = doc_detail::parse_start(doc_detail::field(root, "start", "document"));
    return doc;
}

inline GraphDocument load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Parse, "cannot read " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_document(buffer.str());
}

inline nlohmann::json to_json(const GraphDocument& doc) {
    using doc_detail::json;
    json barriers = json::array();
    for (const auto& b : doc.graph.barriers) {
        json moves = json::array();
        for (const auto& [target, prob] : b.interval_moves) {
            moves.push_back({{"to_barrier", target}, {"prob", prob}});
        }
        json half_moves = json::array();
        for (const auto& [label, prob] : b.halfline_moves) {
            half_moves.push_back({{"label", label}, {"prob", prob}});
        }
        barriers.push_back({{"id", b.id},
                            {"stay", b.stay},
                            {"absorb", b.absorb},
                            {"moves", std::move(moves)},
                            {"half_line_moves", std::move(half_moves)}});
    }
    json intervals = json::array();
    for (const auto& e : doc.graph.intervals) {
        intervals.push_back(
            {{"from", e.from}, {"to", e.to}, {"interior_states", e.interior_states}, {"p", e.p}, {"q", e.q}});
    }
    json half_lines = json::array();
    for (const auto& h : doc.graph.halflines) {
        half_lines.push_back({{"owner", h.owner}, {"label", h.label}, {"p", h.p}, {"q", h.q}});
    }
    return {{"barriers", std::move(barriers)},
            {"intervals", std::move(intervals)},
            {"half_lines", std::move(half_lines)},
            {"start", doc_detail::start_json(doc.start)}};
}

inline std::string dump_document(const GraphDocument& doc) { return to_json(doc).dump(2) + "\n"; }

/// "barrier:id", "interval:from:to:k" or "half:owner:label:k".
inline Position parse_state(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t begin = 0;
    while (true) {
        const auto end = text.find(':', begin);
        parts.push_back(text.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin));
        if (end == std::string_view::npos) {
            break;
        }
        begin = end + 1;
    }
    auto to_int = [&text](std::string_view part) {
        int value = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
        if (ec != std::errc() || ptr != part.data() + part.size()) {
            throw Error(ErrorCode::Config, "bad state address \"" + std::string(text) + "\"");
        }
        return value;
    };
    if (parts.size() == 2 && parts[0] == "barrier") {
        return AtBarrier{to_int(parts[1])};
    }
    if (parts.size() == 4 && parts[0] == "interval") {
        return OnInterval{to_int(parts[1]), to_int(parts[2]), to_int(parts[3])};
    }
    if (parts.size() == 4 && parts[0] == "half") {
        return OnHalfLine{to_int(parts[1]), to_int(parts[2]), to_int(parts[3])};
    }
    throw Error(ErrorCode::Config,
                "bad state address \"" + std::string(text) + "\"; use interval:from:to:k or half:owner:label:k");
}

} // namespace barrier_walk
