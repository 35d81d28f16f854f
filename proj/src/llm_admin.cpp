#include "cogalign/llm_admin.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <ctime>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "cogalign/errors.hpp"
#include "cogalign/rng.hpp"

namespace cogalign {

namespace {

using nlohmann::json;

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[48];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

struct BaseUrl {
    std::string scheme_host_port;
    std::string path_prefix;
};

BaseUrl split_base_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorCode::ConfigError, "base_url needs a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    BaseUrl out;
    if (path_start == std::string::npos) {
        out.scheme_host_port = url;
    } else {
        out.scheme_host_port = url.substr(0, path_start);
        out.path_prefix = url.substr(path_start);
    }
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
    return out;
}

enum class AttemptOutcome { Ok, Retryable, Unreachable, Fatal, Auth };

struct AttemptResult {
    AttemptOutcome outcome = AttemptOutcome::Fatal;
    std::string content;
    std::string error;
};

AttemptResult attempt_request(httplib::Client& client, const std::string& path, const std::string& body,
                              const httplib::Headers& headers) {
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) return {AttemptOutcome::Unreachable, {}, "transport error: " + httplib::to_string(res.error())};
    const int status = res->status;
    if (status == 401 || status == 403) return {AttemptOutcome::Auth, {}, "HTTP " + std::to_string(status)};
    if (status == 429 || status >= 500) return {AttemptOutcome::Retryable, {}, "HTTP " + std::to_string(status)};
    if (status != 200) return {AttemptOutcome::Fatal, {}, "HTTP " + std::to_string(status)};
    try {
        const json parsed = json::parse(res->body);
        return {AttemptOutcome::Ok, parsed.at("choices").at(0).at("message").at("content").get<std::string>(), {}};
    } catch (const json::exception& e) {
        return {AttemptOutcome::Fatal, {}, std::string("malformed completion: ") + e.what()};
    }
}

}  // namespace

std::string_view to_string(PromptCondition c) {
    switch (c) {
        case PromptCondition::Baseline: return "Baseline";
        case PromptCondition::RolePlay: return "RolePlay";
        case PromptCondition::DualStrategy: return "DualStrategy";
    }
    return "?";
}

std::optional<PromptCondition> parse_condition(std::string_view label) {
    const std::string l = lower(label);
    if (l == "baseline") return PromptCondition::Baseline;
    if (l == "roleplay" || l == "role-play") return PromptCondition::RolePlay;
    if (l == "dualstrategy" || l == "dual-strategy") return PromptCondition::DualStrategy;
    return std::nullopt;
}

RenderedPrompt render_prompt(const Item& item, PromptCondition condition, std::string_view mitigation_block) {
    RenderedPrompt out;
    switch (condition) {
        case PromptCondition::Baseline:
            break;
        case PromptCondition::RolePlay:
            out.system_text = std::string(kRolePlayInstruction);
            break;
        case PromptCondition::DualStrategy:
            out.system_text = std::string(kRolePlayInstruction) + "\n" + std::string(mitigation_block);
            break;
    }
    out.user_text = item.text + "\n\n";
    if (const auto* mc = std::get_if<MultipleChoice>(&item.format)) {
        out.user_text += "Options: ";
        for (std::size_t i = 0; i < mc->options.size(); ++i) {
            if (i) out.user_text += ", ";
            out.user_text += mc->options[i];
        }
        out.user_text += "\nAnswer with the option letter only.";
    } else {
        const auto& lk = std::get<Likert>(item.format);
        out.user_text += "Answer with a single integer " + std::to_string(lk.min) + "–" +
                         std::to_string(lk.max) + ".";
    }
    return out;
}

std::optional<ScoredValue> parse_response(std::string_view raw, const Item& item) {
    if (const auto* mc = std::get_if<MultipleChoice>(&item.format)) {
        std::size_t i = 0;
        while (i < raw.size()) {
            if (!is_word_char(raw[i])) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < raw.size() && is_word_char(raw[j])) ++j;
            const std::string word = lower(raw.substr(i, j - i));
            for (const auto& opt : mc->options) {
                if (lower(opt) == word) {
                    const bool correct = opt == mc->rational_key;
                    return ScoredValue{correct ? 1.0 : 0.0, correct};
                }
            }
            i = j;
        }
        return std::nullopt;
    }
    const auto& lk = std::get<Likert>(item.format);
    std::size_t i = 0;
    while (i < raw.size()) {
        if (!std::isdigit(static_cast<unsigned char>(raw[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < raw.size() && std::isdigit(static_cast<unsigned char>(raw[j]))) ++j;
        // Digits glued to letters or decimals ("3rd", "2.5") are not standalone integers.
        const bool glued_before = i > 0 && (std::isalpha(static_cast<unsigned char>(raw[i - 1])) || raw[i - 1] == '.');
        const bool glued_after = j < raw.size() && (std::isalpha(static_cast<unsigned char>(raw[j])) ||
                                                    (raw[j] == '.' && j + 1 < raw.size() &&
                                                     std::isdigit(static_cast<unsigned char>(raw[j + 1]))));
        if (!glued_before && !glued_after && j - i <= 9) {
            int value = std::stoi(std::string(raw.substr(i, j - i)));
            if (i > 0 && raw[i - 1] == '-') value = -value;
            if (value >= lk.min && value <= lk.max) return ScoredValue{static_cast<double>(value), std::nullopt};
        }
        i = j;
    }
    return std::nullopt;
}

SessionSummary administer(const SessionPlan& plan, const EndpointConfig& endpoint,
                          const ScaleDefinition& scale, const TranscriptSink& sink) {
    if (plan.runs < 1) throw Error(ErrorCode::ConfigError, "runs must be at least 1");
    if (endpoint.parallelism < 1) throw Error(ErrorCode::ConfigError, "parallelism must be at least 1");
    if (endpoint.request_params.temperature < 0.0 || endpoint.request_params.temperature > 2.0) {
        throw Error(ErrorCode::ConfigError, "temperature must lie in [0, 2]");
    }
    if (!validate_scale(scale).valid()) throw Error(ErrorCode::SchemaViolation, "scale is not valid");

    std::string token;
    if (!endpoint.auth_env.empty()) {
        const char* value = std::getenv(endpoint.auth_env.c_str());
        if (value == nullptr || *value == '\0') {
            throw Error(ErrorCode::AuthFailure, "environment variable " + endpoint.auth_env + " is not set");
        }
        token = value;
    }

    const BaseUrl url = split_base_url(endpoint.base_url);
    const std::string path = url.path_prefix + "/chat/completions";
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

    const std::size_t k = scale.items.size();
    const std::size_t total = static_cast<std::size_t>(plan.runs) * k;

    std::vector<TranscriptRecord> results(total);
    std::vector<char> ready(total, 0);
    std::vector<std::atomic<bool>> run_aborted(static_cast<std::size_t>(plan.runs));
    for (auto& flag : run_aborted) flag = false;
    std::atomic<bool> auth_failed{false};
    std::atomic<bool> unreachable{false};
    std::atomic<std::size_t> next_task{0};
    std::mutex mutex;
    std::condition_variable cv;
    std::string auth_error;
    std::string unreachable_error;

    auto worker = [&]() {
        httplib::Client client(url.scheme_host_port);
        const auto timeout = std::chrono::duration<double>(endpoint.timeout_seconds);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
        client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

        for (;;) {
            const std::size_t task = next_task.fetch_add(1);
            if (task >= total) return;
            const auto run = static_cast<int>(task / k);
            const Item& item = scale.items[task % k];
            const RenderedPrompt prompt = render_prompt(item, plan.condition, plan.mitigation_block);

            TranscriptRecord rec;
            rec.model = endpoint.model_name;
            rec.condition = plan.condition;
            rec.run_index = run;
            rec.item_id = item.id;
            rec.system_text = prompt.system_text;
            rec.prompt_text = prompt.user_text;
            rec.request_params = endpoint.request_params;

            if (auth_failed) {
                rec.status = "failed";
                rec.error = "session aborted after authentication failure";
            } else if (unreachable) {
                rec.status = "failed";
                rec.error = "session aborted: endpoint unreachable";
            } else if (run_aborted[static_cast<std::size_t>(run)]) {
                rec.status = "failed";
                rec.error = "run aborted after exhausted retries";
            } else {
                json body;
                body["model"] = endpoint.model_name;
                json messages = json::array();
                if (!prompt.system_text.empty()) messages.push_back({{"role", "system"}, {"content", prompt.system_text}});
                messages.push_back({{"role", "user"}, {"content", prompt.user_text}});
                body["messages"] = std::move(messages);
                body["temperature"] = endpoint.request_params.temperature;
                body["max_tokens"] = endpoint.request_params.max_tokens;
                body["top_p"] = endpoint.request_params.top_p;
                const std::string payload = body.dump();

                RngStream jitter(derive_seed(plan.seed, task));
                AttemptResult result;
                for (int attempt = 0;; ++attempt) {
                    result = attempt_request(client, path, payload, headers);
                    const bool retryable = result.outcome == AttemptOutcome::Retryable ||
                                           result.outcome == AttemptOutcome::Unreachable;
                    if (!retryable || attempt >= endpoint.max_retries) break;
                    ++rec.retry_count;
                    const double delay = endpoint.backoff_base_seconds * std::pow(endpoint.backoff_factor, attempt) *
                                         (1.0 + 0.25 * jitter.uniform());
                    std::this_thread::sleep_for(std::chrono::duration<double>(delay));
                }
                rec.timestamp = utc_timestamp();
                switch (result.outcome) {
                    case AttemptOutcome::Ok:
                        rec.raw_completion = result.content;
                        rec.parsed = parse_response(result.content, item);
                        break;
                    case AttemptOutcome::Auth: {
                        rec.status = "failed";
                        rec.error = result.error;
                        std::lock_guard lock(mutex);
                        if (!auth_failed.exchange(true)) auth_error = result.error;
                        break;
                    }
                    case AttemptOutcome::Retryable:
                        rec.status = "failed";
                        rec.error = result.error;
                        run_aborted[static_cast<std::size_t>(run)] = true;
                        break;
                    case AttemptOutcome::Unreachable: {
                        rec.status = "failed";
                        rec.error = result.error;
                        std::lock_guard lock(mutex);
                        if (!unreachable.exchange(true)) unreachable_error = result.error;
                        break;
                    }
                    case AttemptOutcome::Fatal:
                        rec.status = "failed";
                        rec.error = result.error;
                        break;
                }
            }
            if (rec.timestamp.empty()) rec.timestamp = utc_timestamp();
            {
                std::lock_guard lock(mutex);
                results[task] = std::move(rec);
                ready[task] = 1;
            }
            cv.notify_all();
        }
    };

    const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(endpoint.parallelism), std::max<std::size_t>(total, 1));
    std::vector<std::thread> workers;
    workers.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) workers.emplace_back(worker);

    SessionSummary summary;
    std::size_t correct = 0;
    std::size_t answered = 0;
    for (std::size_t task = 0; task < total; ++task) {
        TranscriptRecord rec;
        {
            std::unique_lock lock(mutex);
            cv.wait(lock, [&] { return ready[task] != 0; });
            rec = results[task];
        }
        if (rec.status == "ok") {
            ++summary.completed;
            if (!rec.parsed) ++summary.unparseable;
            if (rec.parsed && rec.parsed->correct) {
                ++answered;
                if (*rec.parsed->correct) ++correct;
            }
        } else {
            ++summary.failed;
        }
        summary.total_retries += static_cast<std::size_t>(rec.retry_count);
        sink(rec);
    }
    for (auto& t : workers) t.join();

    for (int r = 0; r < plan.runs; ++r) {
        if (run_aborted[static_cast<std::size_t>(r)]) summary.aborted_runs.push_back(r);
    }
    if (answered > 0) summary.accuracy = round2(100.0 * static_cast<double>(correct) / static_cast<double>(answered));
    if (auth_failed) throw Error(ErrorCode::AuthFailure, auth_error);
    if (unreachable) throw Error(ErrorCode::EndpointUnreachable, endpoint.base_url + ": " + unreachable_error);
    return summary;
}

ResponseMatrix transcripts_to_matrix(const std::vector<TranscriptRecord>& records, const ScaleDefinition& scale,
                                     const std::string& group_label) {
    std::map<int, std::size_t> run_rows;
    for (const auto& rec : records) {
        if (!scale.index_of(rec.item_id)) {
            throw Error(ErrorCode::ScaleMismatch, "transcript item '" + rec.item_id + "' not in scale " + scale.name);
        }
        run_rows.emplace(rec.run_index, 0);
    }
    std::vector<std::string> row_ids;
    for (auto& [run, row] : run_rows) {
        row = row_ids.size();
        row_ids.push_back("run-" + std::to_string(run));
    }
    std::vector<std::string> item_ids;
    for (const auto& item : scale.items) item_ids.push_back(item.id);
    ResponseMatrix m(group_label, std::move(row_ids), std::move(item_ids), {scale.name, scale.version});
    for (const auto& rec : records) {
        if (rec.status != "ok" || !rec.parsed) continue;
        m.set(run_rows.at(rec.run_index), *scale.index_of(rec.item_id), rec.parsed->value);
    }
    return m;
}

}  // namespace cogalign
