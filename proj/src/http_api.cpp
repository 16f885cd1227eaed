#include "sreview/http_api.hpp"

#include "sreview/text.hpp"

#include <map>
#include <optional>
#include <vector>

namespace sreview {

int http_status(ErrorCode code)
{
    switch (code) {
    case ErrorCode::UnknownSubmission:
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownForm:
        return 404;
    case ErrorCode::WrongState:
    case ErrorCode::NotSubmitted:
    case ErrorCode::DuplicateSubmission:
    case ErrorCode::DuplicateReviewer:
    case ErrorCode::VersionConflict:
    case ErrorCode::AwaitingThirdReviewer:
    case ErrorCode::SessionsIncomplete:
    case ErrorCode::IncompleteSession:
    case ErrorCode::CheckerMismatch:
    case ErrorCode::SessionClosed:
        return 409;
    case ErrorCode::InvalidRequest:
        return 400;
    case ErrorCode::StorageFailure:
    case ErrorCode::ReplayDivergence:
        return 500;
    default:
        return 422;
    }
}

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using Version = VenueService::Version;

struct Request {
    std::string method;
    std::vector<std::string> segments;
    std::map<std::string, std::string> query;
    json body;
};

std::string url_decode(std::string_view s)
{
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
            i += 2;
        } else if (s[i] == '+') {
            out += ' ';
        } else {
            out += s[i];
        }
    }
    return out;
}

Request parse_request(std::string_view method, std::string_view target, std::string_view body)
{
    Request r;
    r.method = std::string(method);
    auto q = target.find('?');
    auto path = target.substr(0, q);
    for (const auto& seg : split(path, '/'))
        if (!seg.empty()) r.segments.push_back(url_decode(seg));
    if (q != std::string_view::npos) {
        for (const auto& kv : split(target.substr(q + 1), '&')) {
            if (kv.empty()) continue;
            auto eq = kv.find('=');
            if (eq == std::string::npos) r.query[url_decode(kv)] = "";
            else r.query[url_decode(kv.substr(0, eq))] = url_decode(kv.substr(eq + 1));
        }
    }
    if (!trim(body).empty()) {
        try {
            r.body = json::parse(body);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::InvalidRequest, std::string("body is not valid JSON: ") + e.what());
        }
        if (!r.body.is_object()) throw Error(ErrorCode::InvalidRequest, "body must be a JSON object");
    } else {
        r.body = json::object();
    }
    return r;
}

HttpResponse ok(const ojson& j, int status = 200)
{
    return {status, j.dump(), "application/json"};
}

HttpResponse error_response(int status, std::string_view code, std::string_view message)
{
    ojson j;
    j["error"] = code;
    j["message"] = message;
    return {status, j.dump(), "application/json"};
}

Version expected_version(const json& body)
{
    if (!body.contains("expected_version") || body["expected_version"].is_null()) return std::nullopt;
    return body["expected_version"].get<std::uint64_t>();
}

std::vector<std::string> string_list(const json& body, const char* key)
{
    if (!body.contains(key) || body[key].is_null()) return {};
    return body[key].get<std::vector<std::string>>();
}

std::string required_string(const json& body, const char* key)
{
    if (!body.contains(key) || !body[key].is_string())
        throw Error(ErrorCode::InvalidRequest, std::string("'") + key + "' must be a string");
    return body[key].get<std::string>();
}

bool wants_text(const Request& r)
{
    auto it = r.query.find("format");
    return it != r.query.end() && it->second == "text";
}

class Router {
public:
    Router(VenueService& service, const Request& req) : svc_(service), req_(req) {}

    std::optional<HttpResponse> route()
    {
        const auto& s = req_.segments;
        const auto n = s.size();
        if (n >= 1 && s[0] == "submissions") {
            if (n == 1 && is("POST")) return create_submission();
            if (n == 1 && is("GET")) return ok(ojson(svc_.submission_ids()));
            if (n == 2 && is("GET")) return show_submission(s[1]);
            if (n == 3) return submission_action(s[1], s[2]);
        }
        if (n == 2 && s[0] == "forms" && is("GET")) {
            auto form = svc_.form(s[1]);
            if (wants_text(req_)) return HttpResponse{200, export_form_text(form), "text/plain"};
            return ok(form_to_json(form));
        }
        if (n >= 2 && s[0] == "sessions") {
            if (n == 2 && is("GET")) return show_session(s[1]);
            if (n == 3) return session_action(s[1], s[2]);
        }
        return std::nullopt;
    }

private:
    VenueService& svc_;
    const Request& req_;

    bool is(std::string_view m) const { return req_.method == m; }

    HttpResponse create_submission()
    {
        const auto& b = req_.body;
        SubmissionMeta meta;
        meta.submission_id = b.value("submission_id", std::string());
        meta.title = b.value("title", std::string());
        meta.adhoc_fallback = b.value("adhoc_fallback", false);
        auto sub = svc_.ingest_submission(meta, declaration_from_json(b), expected_version(b));
        auto j = submission_to_json(sub);
        j["version"] = svc_.version(sub.submission_id);
        return ok(j, 201);
    }

    HttpResponse show_submission(const std::string& id)
    {
        auto j = submission_to_json(svc_.submission(id));
        j["version"] = svc_.version(id);
        auto t = svc_.last_triage(id);
        j["triage"] = t ? triage_to_json(*t) : ojson(nullptr);
        auto a = svc_.assignment(id);
        j["assignment"] = a ? assignment_to_json(*a) : ojson(nullptr);
        return ok(j);
    }

    HttpResponse submission_action(const std::string& id, const std::string& action)
    {
        const auto& b = req_.body;
        if (action == "checklist" && is("GET")) {
            auto c = svc_.checklist(id);
            if (wants_text(req_)) return {200, export_checklist_text(c), "text/plain"};
            return ok(checklist_to_json(c));
        }
        if (action == "triage" && is("POST")) {
            std::vector<TriageCheck> checks;
            if (b.contains("checks")) {
                for (const auto& c : b["checks"]) {
                    if (!c.is_object() || !c.contains("text") || !c.contains("pass"))
                        throw Error(ErrorCode::InvalidRequest, "each check needs 'text' and 'pass'");
                    checks.push_back({c["text"].get<std::string>(), c["pass"].get<bool>()});
                }
            }
            std::optional<MethodDeclaration> corrected;
            if (b.contains("corrected_methods") && !b["corrected_methods"].is_null())
                corrected = declaration_from_json(b["corrected_methods"]);
            auto t = svc_.run_triage(id, required_string(b, "triager_id"), checks, corrected,
                                     string_list(b, "adhoc_items"), expected_version(b));
            auto j = triage_to_json(t);
            auto sub = svc_.submission(id);
            j["status"] = to_string(sub.status);
            j["form_id"] = sub.form_id ? ojson(*sub.form_id) : ojson(nullptr);
            j["version"] = svc_.version(id);
            return ok(j);
        }
        if (action == "reviewers" && is("POST")) {
            auto ids = string_list(b, "reviewer_ids");
            ReviewAssignment a;
            if (svc_.submission(id).status == SubmissionStatus::AwaitingThird) {
                if (ids.size() != 1) throw Error(ErrorCode::InvalidRequest, "recruit exactly one third reviewer");
                a = svc_.add_third_reviewer(id, ids.front(), expected_version(b));
            } else {
                a = svc_.open_reviews(id, ids, expected_version(b));
            }
            auto j = assignment_to_json(a);
            j["status"] = to_string(svc_.submission(id).status);
            j["version"] = svc_.version(id);
            return ok(j);
        }
        if (action == "agreement" && is("GET")) return ok(report_to_json(svc_.agreement(id)));
        if (action == "decision" && is("POST")) {
            auto j = decision_to_json(svc_.finalize_decision(id, expected_version(b)));
            j["version"] = svc_.version(id);
            return ok(j);
        }
        if (action == "decision" && is("GET")) return ok(decision_to_json(svc_.decision(id)));
        if (action == "revision-check" && is("POST")) {
            std::map<std::string, bool> marks;
            if (b.contains("marks")) marks = b["marks"].get<std::map<std::string, bool>>();
            auto out = svc_.verify_revision_completion(id, required_string(b, "checker_id"), marks, expected_version(b));
            ojson j;
            j["status"] = to_string(out.status);
            j["accepted"] = out.check.accepted;
            j["open_items"] = out.check.open_items;
            j["version"] = svc_.version(id);
            return ok(j);
        }
        if (action == "letter" && is("GET")) {
            auto d = svc_.decision(id);
            if (!d.letter) throw Error(ErrorCode::WrongState, "no decision has been made");
            if (wants_text(req_)) return {200, letter_to_text(*d.verdict, *d.letter), "text/plain"};
            return ok(letter_to_json(*d.letter));
        }
        if (action == "export" && is("GET")) {
            ojson j;
            j["hash"] = svc_.export_hash(id);
            j["state"] = svc_.export_state(id);
            return ok(j);
        }
        throw Error(ErrorCode::InvalidRequest, "no route " + req_.method + " /submissions/{id}/" + action);
    }

    ojson session_body(const Session& s)
    {
        auto j = session_to_json(s);
        const auto owner = svc_.submission_of_session(s.session_id);
        j["submission_id"] = owner;
        j["version"] = svc_.version(owner);
        return j;
    }

    HttpResponse show_session(const std::string& id) { return ok(session_body(svc_.session(id))); }

    Answer parse_answer(const std::string& session_id, const std::string& item_key, const std::string& node_id)
    {
        const auto& b = req_.body;
        if (!b.contains("value")) throw Error(ErrorCode::InvalidRequest, "'value' is required");
        std::string value;
        if (b["value"].is_boolean()) value = b["value"].get<bool>() ? "yes" : "no";
        else if (b["value"].is_string()) value = b["value"].get<std::string>();
        else throw Error(ErrorCode::InvalidRequest, "'value' must be a string or boolean");

        AnswerKind kind;
        if (b.contains("kind")) {
            kind = parse_answer_kind(b["kind"].get<std::string>());
        } else {
            auto s = svc_.session(session_id);
            const auto* item = s.plan->find(item_key);
            if (!item) throw Error(ErrorCode::UnknownItem, "no item '" + item_key + "' on this form");
            kind = node_for(*item, node_id).answer_kind;
        }
        return {kind, value};
    }

    HttpResponse session_action(const std::string& id, const std::string& action)
    {
        const auto& b = req_.body;
        if (action == "log" && is("GET")) return {200, svc_.session_log(id), "application/x-ndjson"};
        if (!is("POST")) throw Error(ErrorCode::InvalidRequest, "no route " + req_.method + " /sessions/{id}/" + action);
        const auto v = expected_version(b);
        if (action == "answers") {
            const auto item = required_string(b, "item_key");
            const auto node = b.value("node_id", std::string(kRootNode));
            return ok(session_body(svc_.answer(id, item, node, parse_answer(id, item, node), v)));
        }
        if (action == "marks") {
            if (!b.contains("present") || !b["present"].is_boolean())
                throw Error(ErrorCode::InvalidRequest, "'present' must be a boolean");
            return ok(session_body(svc_.mark(id, required_string(b, "item_key"), b["present"].get<bool>(), v)));
        }
        if (action == "comments") return ok(session_body(svc_.comment(id, required_string(b, "text"), v)));
        if (action == "complete") {
            auto version = v;
            if (b.contains("comments") && b["comments"].is_string()) {
                svc_.comment(id, b["comments"].get<std::string>(), version);
                if (version) version = *version + 1;
            }
            return ok(session_body(svc_.complete_session(id, version)));
        }
        if (action == "reopen") return ok(session_body(svc_.reopen_session(id, v)));
        throw Error(ErrorCode::InvalidRequest, "no route POST /sessions/{id}/" + action);
    }
};

} // namespace

HttpResponse HttpApi::handle(std::string_view method, std::string_view target, std::string_view body) const
{
    try {
        auto req = parse_request(method, target, body);
        Router router(service_, req);
        if (auto r = router.route()) return *r;
        return error_response(404, "NotFound", "no route " + std::string(method) + " " + std::string(target));
    } catch (const Error& e) {
        return error_response(http_status(e.code()), to_string(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return error_response(400, "InvalidRequest", e.what());
    } catch (const std::exception& e) {
        return error_response(500, "InternalError", e.what());
    }
}

} // namespace sreview
