// Command-line front end: standards validation, form composition, session
// replay, agreement statistics, offline decisions and the HTTP service.
#include "sreview/agreement.hpp"
#include "sreview/decision.hpp"
#include "sreview/error.hpp"
#include "sreview/form.hpp"
#include "sreview/http_api.hpp"
#include "sreview/session.hpp"
#include "sreview/standards.hpp"
#include "sreview/text.hpp"
#include "sreview/venue.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace sreview;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string env_or(const char* name, std::string fallback)
{
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

std::vector<std::string> csv(const std::string& s)
{
    std::vector<std::string> out;
    for (auto& part : split(s, ',')) {
        auto t = trim(part);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

struct FormOptions {
    std::string standards;
    std::string methods;
    std::string supplements;
    std::vector<std::string> adhoc;
    std::string format = "text";
};

void add_form_options(CLI::App* cmd, FormOptions& o)
{
    cmd->add_option("--standards", o.standards, "Standards directory (default: $SREVIEW_STANDARDS or ./standards)");
    cmd->add_option("--methods", o.methods, "Comma-separated method standard ids");
    cmd->add_option("--supplements", o.supplements, "Comma-separated supplement ids");
    cmd->add_option("--adhoc", o.adhoc, "Ad-hoc essential item (repeatable)");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
}

std::string standards_dir(const std::string& flag)
{
    return flag.empty() ? env_or("SREVIEW_STANDARDS", "standards") : flag;
}

ReviewForm build_form(const FormOptions& o)
{
    auto registry = load_registry(standards_dir(o.standards));
    MethodDeclaration decl{csv(o.methods), csv(o.supplements)};
    return o.adhoc.empty() ? compose_form(decl, registry) : compose_form(decl, registry, o.adhoc);
}

int cmd_validate(const std::string& dir)
{
    auto registry = load_registry(dir);
    auto diags = validate_registry(registry);
    for (const auto& d : diags) std::cout << d.field << ": " << d.rule << "\n";
    if (!diags.empty()) return 1;
    std::cout << "ok: " << registry.standards.size() << " standards, " << registry.trees.size() << " trees\n";
    return 0;
}

int cmd_session_replay(const std::string& path, const std::string& format)
{
    auto s = replay_session_log(read_file(path));
    if (format == "json") {
        std::cout << session_to_json(s).dump(2) << "\n";
        return 0;
    }
    std::cout << "session " << s.session_id << " (" << s.reviewer_id << ", " << to_string(s.state) << ")\n";
    for (const auto& item : s.plan->items) {
        std::cout << item.key << ": ";
        if (item.category == Category::Essential) {
            auto st = item_status(s, item.key);
            if (!st) std::cout << "pending at " << pending_node(s, item.key).value_or("?");
            else std::cout << to_string(st->status) << (st->note ? " - " + *st->note : "");
        } else {
            auto it = s.desirable_marks.find(item.key);
            std::cout << (it == s.desirable_marks.end() ? "unmarked" : it->second ? "present" : "absent");
        }
        std::cout << "\n";
    }
    return 0;
}

int cmd_agreement(const std::string& path, ThresholdPolicy policy, const std::string& format)
{
    auto m = parse_ratings(read_file(path));
    auto report = evaluate_threshold(m, policy);
    if (format == "json") {
        std::cout << report_to_json(report).dump(2) << "\n";
        return 0;
    }
    auto show = [](const std::optional<double>& v) {
        std::ostringstream out;
        if (v) out << *v;
        else out << "undefined";
        return out.str();
    };
    std::cout << "raters: " << m.raters.size() << ", units: " << m.units.size() << "\n";
    std::cout << "percent agreement: " << report.percent << "\n";
    std::cout << "kappa: " << show(report.kappa) << "\n";
    std::cout << "alpha: " << show(report.alpha) << "\n";
    if (report.degenerate) std::cout << "statistic is undefined for these ratings\n";
    std::cout << "recommendation: " << to_string(report.recommendation) << " (" << to_string(policy.metric)
              << " vs " << policy.threshold << ")\n";
    return 0;
}

int cmd_decide(const std::string& rules_path, const std::vector<std::string>& logs, const std::string& format)
{
    auto rules = parse_venue_rules(read_file(rules_path));
    std::vector<Session> sessions;
    for (const auto& log : logs) sessions.push_back(replay_session_log(read_file(log)));
    std::optional<AgreementReport> report;
    if (rules.agreement_policy && sessions.size() >= 2) {
        std::vector<Session> original(sessions.begin(),
                                      sessions.begin() + std::min<std::size_t>(sessions.size(), rules.reviewers_required));
        report = evaluate_threshold(ratings_from_sessions(original, rules.agreement_policy->scope), *rules.agreement_policy);
    }
    if (report && report->recommendation == Recommendation::RecruitThirdReviewer &&
        sessions.size() <= static_cast<std::size_t>(rules.reviewers_required)) {
        if (format == "json") std::cout << nlohmann::ordered_json{{"status", "awaiting-third"}, {"agreement", report_to_json(*report)}}.dump(2) << "\n";
        else std::cout << "agreement below threshold: recruit a third reviewer\n";
        return 3;
    }
    auto consensus = aggregate(sessions, rules);
    auto verdict = decide(consensus, sessions, rules);
    auto letter = generate_letter(verdict, consensus, sessions);
    if (format == "json") {
        nlohmann::ordered_json j;
        j["agreement"] = report ? report_to_json(*report) : nlohmann::ordered_json(nullptr);
        j["consensus"] = consensus_to_json(consensus);
        j["verdict"] = verdict_to_json(verdict);
        j["letter"] = letter_to_json(letter);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << letter_to_text(verdict, letter);
    }
    return 0;
}

std::pair<std::string, int> parse_addr(const std::string& addr)
{
    auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorCode::InvalidConfig, "address must be host:port, got '" + addr + "'");
    try {
        return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig, "bad port in '" + addr + "'");
    }
}

int cmd_serve(const std::string& store_flag, const std::string& addr_flag, const std::string& standards_flag,
              const std::string& venue_flag)
{
    const auto store = store_flag.empty() ? env_or("SREVIEW_STORE", "store") : store_flag;
    const auto addr = addr_flag.empty() ? env_or("SREVIEW_ADDR", "127.0.0.1:8080") : addr_flag;
    const auto venue = venue_flag.empty() ? env_or("SREVIEW_VENUE", "") : venue_flag;
    auto [host, port] = parse_addr(addr);

    auto registry = load_registry(standards_dir(standards_flag));
    auto diags = validate_registry(registry);
    if (!diags.empty()) {
        for (const auto& d : diags) std::cerr << d.field << ": " << d.rule << "\n";
        return 1;
    }
    VenueRules rules;
    if (!venue.empty()) rules = parse_venue_rules(read_file(venue));

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    VenueService service(std::move(registry), rules, store);
    HttpApi api(service);
    HttpServer server(api);
    const int bound = server.start(host, port);
    std::cout << "listening on " << host << ":" << bound << " (store " << store << ")" << std::endl;
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Structured peer review against empirical standards"};
    app.require_subcommand(1);

    std::string validate_dir;
    auto* validate = app.add_subcommand("validate", "Check a standards directory");
    validate->add_option("dir", validate_dir, "Standards directory")->required();

    FormOptions compose_opts;
    auto* compose = app.add_subcommand("compose", "Compose a review form");
    add_form_options(compose, compose_opts);

    FormOptions checklist_opts;
    auto* checklist = app.add_subcommand("checklist", "Print the author pre-submission checklist");
    add_form_options(checklist, checklist_opts);

    auto* session = app.add_subcommand("session", "Session log tools");
    session->require_subcommand(1);
    std::string replay_log, replay_format = "text";
    auto* replay = session->add_subcommand("replay", "Rebuild a session from its log");
    replay->add_option("log", replay_log, "Session log (JSON lines)")->required();
    replay->add_option("--format", replay_format)->check(CLI::IsMember({"text", "json"}));

    std::string ratings_file, agreement_format = "text", metric = "kappa";
    ThresholdPolicy policy;
    bool strict_degenerate = false;
    auto* agreement = app.add_subcommand("agreement", "Inter-rater agreement for a ratings file");
    agreement->add_option("ratings", ratings_file, "Ratings table: header 'rater,unit...', NA for missing")->required();
    agreement->add_option("--metric", metric)->check(CLI::IsMember({"percent", "kappa", "alpha"}));
    agreement->add_option("--threshold", policy.threshold);
    agreement->add_flag("--strict-degenerate", strict_degenerate, "Treat undefined statistics as insufficient");
    agreement->add_option("--format", agreement_format)->check(CLI::IsMember({"text", "json"}));

    std::string venue_file, decide_format = "text";
    std::vector<std::string> logs;
    auto* decide_cmd = app.add_subcommand("decide", "Decide from completed session logs");
    decide_cmd->add_option("--venue", venue_file, "Venue rules file")->required();
    decide_cmd->add_option("logs", logs, "Session logs")->required();
    decide_cmd->add_option("--format", decide_format)->check(CLI::IsMember({"text", "json"}));

    std::string store, addr, serve_standards, serve_venue;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--store", store, "Event store directory (default: $SREVIEW_STORE or ./store)");
    serve->add_option("--addr", addr, "Listen address host:port (default: $SREVIEW_ADDR or 127.0.0.1:8080)");
    serve->add_option("--standards", serve_standards, "Standards directory (default: $SREVIEW_STANDARDS or ./standards)");
    serve->add_option("--venue", serve_venue, "Venue rules file (default: $SREVIEW_VENUE or built-in journal rules)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) return cmd_validate(validate_dir);
        if (*compose) {
            auto form = build_form(compose_opts);
            std::cout << (compose_opts.format == "json" ? form_to_json(form).dump(2) + "\n" : export_form_text(form));
            return 0;
        }
        if (*checklist) {
            auto c = author_checklist(build_form(checklist_opts));
            std::cout << (checklist_opts.format == "json" ? checklist_to_json(c).dump(2) + "\n" : export_checklist_text(c));
            return 0;
        }
        if (*replay) return cmd_session_replay(replay_log, replay_format);
        if (*agreement) {
            policy.metric = parse_metric(metric);
            policy.treat_degenerate_as_pass = !strict_degenerate;
            return cmd_agreement(ratings_file, policy, agreement_format);
        }
        if (*decide_cmd) return cmd_decide(venue_file, logs, decide_format);
        if (*serve) return cmd_serve(store, addr, serve_standards, serve_venue);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
