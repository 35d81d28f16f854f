#include "cogalign/mock_server.hpp"

#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "cogalign/errors.hpp"

namespace cogalign {

using nlohmann::json;

struct MockServer::Impl {
    ScaleDefinition scale;
    Options options;
    httplib::Server server;
    std::thread thread;
    int port = -1;
    mutable std::mutex mutex;
    std::vector<std::string> bodies;
    int rate_limited = 0;

    const Item* find_item(const std::string& user_text) const {
        const Item* best = nullptr;
        for (const auto& item : scale.items) {
            if (user_text.rfind(item.text, 0) == 0 && (!best || item.text.size() > best->text.size())) best = &item;
        }
        return best;
    }

    std::string answer_for(const Item* item) const {
        switch (options.behavior) {
            case Behavior::FixedAnswer:
                return options.fixed_answer;
            case Behavior::GarbageText:
                return "I would rather not commit to any particular choice here.";
            case Behavior::EchoKey:
            case Behavior::RateLimitThenSucceed:
                break;
        }
        if (item == nullptr) return "unknown scenario";
        if (const auto* mc = std::get_if<MultipleChoice>(&item->format)) return mc->rational_key;
        return std::to_string(std::get<Likert>(item->format).min);
    }

    void handle(const httplib::Request& req, httplib::Response& res) {
        {
            std::lock_guard lock(mutex);
            bodies.push_back(req.body);
            if (!options.required_token.empty() &&
                req.get_header_value("Authorization") != "Bearer " + options.required_token) {
                res.status = 401;
                res.set_content(R"({"error":{"message":"invalid token"}})", "application/json");
                return;
            }
            if (options.behavior == Behavior::RateLimitThenSucceed && rate_limited < options.rate_limit_count) {
                ++rate_limited;
                res.status = 429;
                res.set_content(R"({"error":{"message":"rate limited"}})", "application/json");
                return;
            }
        }
        std::string user_text;
        std::string model = "mock";
        try {
            const json body = json::parse(req.body);
            model = body.value("model", model);
            for (const auto& msg : body.at("messages")) {
                if (msg.at("role") == "user") user_text = msg.at("content").get<std::string>();
            }
        } catch (const json::exception&) {
            res.status = 400;
            res.set_content(R"({"error":{"message":"bad request"}})", "application/json");
            return;
        }
        json reply = {
            {"id", "mock-completion"},
            {"object", "chat.completion"},
            {"model", model},
            {"choices", json::array({{{"index", 0},
                                      {"message", {{"role", "assistant"}, {"content", answer_for(find_item(user_text))}}},
                                      {"finish_reason", "stop"}}})},
        };
        res.set_content(reply.dump(), "application/json");
    }
};

MockServer::MockServer(ScaleDefinition scale, Options options) : impl_(std::make_unique<Impl>()) {
    impl_->scale = std::move(scale);
    impl_->options = std::move(options);
    auto handler = [this](const httplib::Request& req, httplib::Response& res) { impl_->handle(req, res); };
    impl_->server.Post("/chat/completions", handler);
    impl_->server.Post("/v1/chat/completions", handler);
}

MockServer::~MockServer() { stop(); }

void MockServer::start() {
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    if (impl_->port < 0) throw Error(ErrorCode::IoError, "mock server could not bind");
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void MockServer::listen(const std::string& host, int port) {
    impl_->port = port;
    if (!impl_->server.listen(host, port)) throw Error(ErrorCode::IoError, "mock server could not listen on " + host);
}

void MockServer::stop() {
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

int MockServer::port() const { return impl_->port; }

std::string MockServer::base_url() const { return "http://127.0.0.1:" + std::to_string(impl_->port) + "/v1"; }

std::size_t MockServer::request_count() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->bodies.size();
}

std::vector<std::string> MockServer::request_bodies() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->bodies;
}

}  // namespace cogalign
