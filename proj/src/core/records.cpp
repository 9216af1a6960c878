#include "knowada/core/records.hpp"

#include <atomic>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "knowada/core/error.hpp"
#include "knowada/core/text.hpp"

namespace knowada {

namespace fs = std::filesystem;

namespace {

const Json& field(const Json& j, const char* name) {
    if (!j.is_object()) throw Error(ErrorKind::parse, "expected a JSON object");
    const auto it = j.find(name);
    if (it == j.end()) throw Error(ErrorKind::parse, std::string("missing field '") + name + "'");
    return *it;
}

std::string string_field(const Json& j, const char* name) {
    const Json& v = field(j, name);
    if (!v.is_string()) throw Error(ErrorKind::parse, std::string("field '") + name + "' must be a string");
    return v.get<std::string>();
}

std::string nonempty_string_field(const Json& j, const char* name) {
    std::string s = string_field(j, name);
    if (trim(s).empty()) throw Error(ErrorKind::parse, std::string("field '") + name + "' must be non-empty");
    return s;
}

std::int64_t int_field(const Json& j, const char* name) {
    const Json& v = field(j, name);
    if (!v.is_number_integer())
        throw Error(ErrorKind::parse, std::string("field '") + name + "' must be an integer");
    return v.get<std::int64_t>();
}

std::set<std::string> id_set_field(const Json& j, const char* name) {
    const Json& v = field(j, name);
    if (!v.is_array()) throw Error(ErrorKind::parse, std::string("field '") + name + "' must be an array");
    std::set<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) throw Error(ErrorKind::parse, std::string("field '") + name + "' must hold strings");
        out.insert(e.get<std::string>());
    }
    return out;
}

Json id_array(const std::set<std::string>& ids) {
    Json a = Json::array();
    for (const auto& id : ids) a.push_back(id);
    return a;
}

// Wraps enum parse failures (validation) as record parse errors.
template <typename F>
auto as_parse_error(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(ErrorKind::parse, e.what());
    }
}

}  // namespace

Json to_json(const CaptionRecord& r) {
    return Json{{"record_id", r.record_id},
                {"image_ref", r.image_ref},
                {"caption", r.caption},
                {"split", to_string(r.split)},
                {"source", to_string(r.source)}};
}

Json to_json(const ProbeQuestion& q) {
    return Json{{"question_id", q.question_id}, {"record_id", q.record_id}, {"text", q.text}};
}

Json to_json(const AnswerSample& a) {
    return Json{{"question_id", a.question_id},
                {"sample_index", a.sample_index},
                {"text", a.text},
                {"verdict", to_string(a.verdict)}};
}

Json to_json(const DifficultyReport& d) {
    return Json{{"question_id", d.question_id}, {"num_correct", d.num_correct}, {"num_incorrect", d.num_incorrect}};
}

Json to_json(const KnowledgeClassification& k) {
    return Json{{"record_id", k.record_id},
                {"threshold", k.threshold.to_string()},
                {"unknown_question_ids", id_array(k.unknown_question_ids)},
                {"known_question_ids", id_array(k.known_question_ids)}};
}

Json to_json(const AdaptedCaption& a) {
    Json params = Json::object();
    for (const auto& [key, value] : a.params) params[key] = value;
    return Json{{"record_id", a.record_id},
                {"method", to_string(a.method)},
                {"text", a.text},
                {"removed_question_ids", id_array(a.removed_question_ids)},
                {"params", params}};
}

Json to_json(const Proposition& p) {
    return Json{{"prop_id", p.prop_id},
                {"parent_id", p.parent_id},
                {"ordinal", p.ordinal},
                {"text", p.text},
                {"label", to_string(p.label)}};
}

CaptionRecord caption_from_json(const Json& j) {
    CaptionRecord r;
    r.record_id = nonempty_string_field(j, "record_id");
    r.image_ref = string_field(j, "image_ref");
    r.caption = nonempty_string_field(j, "caption");
    r.split = as_parse_error([&] { return parse_split(string_field(j, "split")); });
    r.source = as_parse_error([&] { return parse_source(string_field(j, "source")); });
    return r;
}

ProbeQuestion question_from_json(const Json& j) {
    ProbeQuestion q;
    q.question_id = nonempty_string_field(j, "question_id");
    q.record_id = nonempty_string_field(j, "record_id");
    q.text = string_field(j, "text");
    const auto t = trim(q.text);
    if (t.empty() || t.back() != '?')
        throw Error(ErrorKind::parse, "question '" + q.question_id + "' does not end with '?'");
    return q;
}

AnswerSample answer_from_json(const Json& j) {
    AnswerSample a;
    a.question_id = nonempty_string_field(j, "question_id");
    const auto index = int_field(j, "sample_index");
    if (index < 0 || index > std::numeric_limits<int>::max())
        throw Error(ErrorKind::parse, "sample_index out of range");
    a.sample_index = static_cast<int>(index);
    a.text = string_field(j, "text");
    a.verdict = as_parse_error([&] { return parse_verdict(string_field(j, "verdict")); });
    return a;
}

DifficultyReport difficulty_from_json(const Json& j) {
    DifficultyReport d;
    d.question_id = nonempty_string_field(j, "question_id");
    d.num_correct = int_field(j, "num_correct");
    d.num_incorrect = int_field(j, "num_incorrect");
    if (d.num_correct < 0 || d.num_incorrect < 0 || d.num_correct + d.num_incorrect < 1)
        throw Error(ErrorKind::parse, "difficulty counts must be non-negative with a positive sum");
    return d;
}

KnowledgeClassification classification_from_json(const Json& j) {
    KnowledgeClassification k;
    k.record_id = nonempty_string_field(j, "record_id");
    const Json& t = field(j, "threshold");
    k.threshold = as_parse_error([&] {
        if (t.is_string()) return Rational::parse(t.get<std::string>());
        if (t.is_number()) return Rational::parse(t.dump());
        throw Error(ErrorKind::parse, "threshold must be a string or number");
    });
    if (k.threshold < Rational(0, 1) || k.threshold > Rational(1, 1))
        throw Error(ErrorKind::parse, "threshold outside [0, 1]");
    k.unknown_question_ids = id_set_field(j, "unknown_question_ids");
    k.known_question_ids = id_set_field(j, "known_question_ids");
    for (const auto& id : k.unknown_question_ids)
        if (k.known_question_ids.count(id) != 0)
            throw Error(ErrorKind::parse, "question '" + id + "' is both known and unknown");
    return k;
}

AdaptedCaption adapted_from_json(const Json& j) {
    AdaptedCaption a;
    a.record_id = nonempty_string_field(j, "record_id");
    a.method = as_parse_error([&] { return parse_adapt_method(string_field(j, "method")); });
    a.text = string_field(j, "text");
    a.removed_question_ids = id_set_field(j, "removed_question_ids");
    const Json& params = field(j, "params");
    if (!params.is_object()) throw Error(ErrorKind::parse, "field 'params' must be an object");
    for (const auto& [key, value] : params.items()) {
        if (!value.is_string()) throw Error(ErrorKind::parse, "params values must be strings");
        a.params[key] = value.get<std::string>();
    }
    return a;
}

Proposition proposition_from_json(const Json& j) {
    Proposition p;
    p.prop_id = nonempty_string_field(j, "prop_id");
    p.parent_id = nonempty_string_field(j, "parent_id");
    const auto ordinal = int_field(j, "ordinal");
    if (ordinal < 0) throw Error(ErrorKind::parse, "ordinal must be non-negative");
    p.ordinal = static_cast<int>(ordinal);
    p.text = nonempty_string_field(j, "text");
    p.label = as_parse_error([&] { return parse_label(string_field(j, "label")); });
    return p;
}

void for_each_jsonl(const fs::path& path, const std::function<void(const Json&, std::size_t)>& on_line) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) continue;
        try {
            on_line(Json::parse(line), number);
        } catch (const Json::exception& e) {
            throw Error(ErrorKind::parse, path.string() + ":" + std::to_string(number) + ": " + e.what());
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::parse) throw;
            throw Error(ErrorKind::parse, path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
    }
}

namespace {

fs::path temp_sibling(const fs::path& path) {
    static std::atomic<unsigned> counter{0};
    std::ostringstream name;
    name << path.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id())
         << "." << counter++;
    return path.parent_path() / name.str();
}

}  // namespace

void write_text(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    const fs::path tmp = temp_sibling(path);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
        out << text;
        out.flush();
        if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error(ErrorKind::io, "cannot move output into place at " + path.string() + ": " + ec.message());
    }
}

void write_jsonl(const fs::path& path, const std::vector<Json>& rows) {
    std::string text;
    for (const auto& row : rows) {
        try {
            text += row.dump();
        } catch (const Json::exception& e) {
            throw Error(ErrorKind::validation, std::string("cannot serialise record: ") + e.what());
        }
        text.push_back('\n');
    }
    write_text(path, text);
}

void write_json(const fs::path& path, const Json& value) { write_text(path, value.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::parse, path.string() + ": " + e.what());
    }
}

namespace {

// Loads a file of T, rejecting repeated ids with both line numbers named.
template <typename T, typename Parse, typename Key>
std::vector<T> load_unique(const fs::path& path, Parse parse, Key key, const char* what) {
    std::vector<T> out;
    std::map<std::string, std::size_t> seen;
    for_each_jsonl(path, [&](const Json& j, std::size_t line) {
        T item = parse(j);
        const std::string k = key(item);
        const auto [it, inserted] = seen.emplace(k, line);
        if (!inserted)
            throw Error(ErrorKind::parse, "duplicate " + std::string(what) + " '" + k + "' (first on line " +
                                              std::to_string(it->second) + ", again on line " +
                                              std::to_string(line) + ")");
        out.push_back(std::move(item));
    });
    return out;
}

}  // namespace

std::vector<CaptionRecord> load_dataset(const fs::path& path) {
    return load_unique<CaptionRecord>(path, caption_from_json, [](const auto& r) { return r.record_id; },
                                      "record_id");
}

std::vector<ProbeQuestion> load_questions(const fs::path& path) {
    return load_unique<ProbeQuestion>(path, question_from_json, [](const auto& q) { return q.question_id; },
                                      "question_id");
}

std::vector<AnswerSample> load_answers(const fs::path& path) {
    return load_unique<AnswerSample>(
        path, answer_from_json,
        [](const auto& a) { return a.question_id + "#" + std::to_string(a.sample_index); },
        "(question_id, sample_index)");
}

std::vector<DifficultyReport> load_difficulty(const fs::path& path) {
    return load_unique<DifficultyReport>(path, difficulty_from_json,
                                         [](const auto& d) { return d.question_id; }, "question_id");
}

std::vector<KnowledgeClassification> load_classifications(const fs::path& path) {
    return load_unique<KnowledgeClassification>(path, classification_from_json,
                                                [](const auto& k) { return k.record_id; }, "record_id");
}

std::vector<AdaptedCaption> load_adapted(const fs::path& path) {
    return load_unique<AdaptedCaption>(path, adapted_from_json, [](const auto& a) { return a.record_id; },
                                       "record_id");
}

std::vector<Proposition> load_propositions(const fs::path& path) {
    return load_unique<Proposition>(path, proposition_from_json, [](const auto& p) { return p.prop_id; },
                                    "prop_id");
}

}  // namespace knowada
