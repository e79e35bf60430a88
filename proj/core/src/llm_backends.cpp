// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <regex>
#include <sstream>

#include <httplib.h>

#include "slicegraph/digest.hpp"
#include "slicegraph/llm.hpp"

namespace slicegraph::llm {

namespace {

void check_messages(std::span<const ChatMessage> messages) {
    if (messages.empty()) throw ValidationError("empty message list");
    for (const auto& m : messages)
        if (m.role != Role::Assistant && m.content.empty())
            throw ValidationError(std::string(to_string(m.role)) + " message has empty content");
}

std::string_view last_user_message(std::span<const ChatMessage> messages) {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it)
        if (it->role == Role::User) return it->content;
    return {};
}

std::chrono::duration<double> seconds(double s) { return std::chrono::duration<double>(s); }

}  // namespace

std::string_view to_string(Role role) noexcept {
    switch (role) {
        case Role::System:
            return "system";
        case Role::User:
            return "user";
        case Role::Assistant:
            return "assistant";
    }
    return "user";
}

void to_json(nlohmann::json& j, const ChatMessage& m) {
    j = {{"role", std::string(to_string(m.role))}, {"content", m.content}};
}

std::string prompt_digest(std::span<const ChatMessage> messages) {
    return json_digest(nlohmann::json(std::vector<ChatMessage>(messages.begin(), messages.end())));
}

void validate(const BackendConfig& config) {
    switch (config.kind) {
        case BackendConfig::Kind::Http:
            if (config.base_url.empty()) throw ValidationError("http backend needs a base URL");
            if (config.model.empty()) throw ValidationError("http backend needs a model name");
            break;
        case BackendConfig::Kind::Replay:
            if (config.cassette_path.empty()) throw ValidationError("replay backend needs a cassette path");
            break;
        case BackendConfig::Kind::Mock:
            break;
    }
    if (!(config.timeout_s > 0.0)) throw ValidationError("backend timeout must be positive");
    if (config.max_retries < 0) throw ValidationError("backend max_retries must be non-negative");
}

BackendConfig::Kind parse_backend_kind(std::string_view text) {
    if (text == "http") return BackendConfig::Kind::Http;
    if (text == "mock") return BackendConfig::Kind::Mock;
    if (text == "replay") return BackendConfig::Kind::Replay;
    throw ValidationError("unknown backend \"" + std::string(text) + "\"");
}

// ---------------------------------------------------------------------------
// Mock

MockBackend& MockBackend::on_contains(std::string needle, std::string response) {
    return on([needle = std::move(needle)](std::string_view text) { return text.find(needle) != std::string_view::npos; },
              [response = std::move(response)](std::string_view) { return response; });
}

MockBackend& MockBackend::on(Matcher matcher, Responder responder) {
    if (frozen_) throw MockError("mock rules are frozen");
    rules_.push_back({std::move(matcher), std::move(responder)});
    return *this;
}

MockBackend& MockBackend::otherwise(std::string response) {
    if (frozen_) throw MockError("mock rules are frozen");
    fallback_ = std::move(response);
    return *this;
}

void MockBackend::freeze() { frozen_ = true; }

std::string MockBackend::complete(std::span<const ChatMessage> messages) {
    check_messages(messages);
    frozen_ = true;
    const auto text = last_user_message(messages);
    for (const auto& rule : rules_)
        if (rule.matcher(text)) return rule.responder(text);
    if (fallback_) return *fallback_;
    throw MockError("no mock rule matched the prompt");
}

// ---------------------------------------------------------------------------
// Cassettes

std::vector<CassetteEntry> load_cassette(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CassetteError("cannot open cassette " + path.string());
    std::vector<CassetteEntry> entries;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            entries.push_back({j.at("prompt_digest").get<std::string>(), j.at("response").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(number) + ": " + e.what(), number);
        }
    }
    return entries;
}

std::string ReplayBackend::complete(std::span<const ChatMessage> messages) {
    check_messages(messages);
    const auto digest = prompt_digest(messages);
    std::lock_guard lock(mutex_);
    if (cursor_ >= entries_.size()) throw CassetteError("cassette exhausted");
    const auto& entry = entries_[cursor_];
    if (entry.prompt_digest != digest)
        throw CassetteError("prompt diverges from recording at exchange " + std::to_string(cursor_ + 1) +
                            " (recorded " + entry.prompt_digest + ", got " + digest + ")");
    ++cursor_;
    return entry.response;
}

std::size_t ReplayBackend::remaining() const {
    std::lock_guard lock(mutex_);
    return entries_.size() - cursor_;
}

RecordingBackend::RecordingBackend(Backend& inner, std::filesystem::path cassette)
    : inner_(inner), cassette_(std::move(cassette)) {}

std::string RecordingBackend::complete(std::span<const ChatMessage> messages) {
    auto response = inner_.complete(messages);
    std::lock_guard lock(mutex_);
    std::ofstream out(cassette_, std::ios::binary | std::ios::app);
    if (!out) throw CassetteError("cannot append to cassette " + cassette_.string());
    out << nlohmann::json{{"prompt_digest", prompt_digest(messages)}, {"response", response}}.dump() << '\n';
    return response;
}

// ---------------------------------------------------------------------------
// HTTP

HttpBackend::HttpBackend(BackendConfig config, std::optional<std::string> api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)) {
    validate(config_);
    static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch match;
    if (!std::regex_match(config_.base_url, match, url))
        throw ValidationError("base URL must look like http(s)://host[:port][/path]: " + config_.base_url);
    scheme_host_port_ = match[1].str();
    path_prefix_ = match[2].matched ? match[2].str() : std::string{};
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    if (!api_key_)
        if (const char* env = std::getenv(kApiKeyEnv); env && *env) api_key_ = env;
}

std::string HttpBackend::complete(std::span<const ChatMessage> messages) {
    check_messages(messages);
    const nlohmann::json body = {{"model", config_.model},
                                 {"messages", std::vector<ChatMessage>(messages.begin(), messages.end())},
                                 {"temperature", 0}};
    const auto payload = body.dump();
    const auto path = path_prefix_ + "/chat/completions";

    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        auto client = std::make_shared<httplib::Client>(scheme_host_port_);
        const auto t = std::chrono::duration_cast<std::chrono::microseconds>(seconds(config_.timeout_s));
        client->set_connection_timeout(t);
        client->set_read_timeout(t);
        client->set_write_timeout(t);
        if (api_key_) client->set_bearer_token_auth(*api_key_);

        auto pending = std::async(std::launch::async, [client, path, payload] {
            return client->Post(path, payload, "application/json");
        });
        if (pending.wait_for(seconds(config_.timeout_s)) != std::future_status::ready) {
            client->stop();
            pending.wait();
            last_error = "request timed out after " + std::to_string(config_.timeout_s) + " s";
            continue;
        }
        auto result = pending.get();
        if (!result) {
            last_error = "transport failure: " + httplib::to_string(result.error());
            continue;
        }
        if (result->status < 200 || result->status >= 300) {
            if (attempt == config_.max_retries) throw HttpStatusError(result->status, result->body);
            continue;
        }
        const auto reply = nlohmann::json::parse(result->body, nullptr, false);
        try {
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception&) {
            throw BackendError("completion response lacks choices[0].message.content");
        }
    }
    throw TransportError(last_error + " (" + std::to_string(config_.max_retries + 1) + " attempts to " +
                         scheme_host_port_ + ")");
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
    validate(config);
    switch (config.kind) {
        case BackendConfig::Kind::Http:
            return std::make_unique<HttpBackend>(config);
        case BackendConfig::Kind::Replay:
            return std::make_unique<ReplayBackend>(config.cassette_path);
        case BackendConfig::Kind::Mock:
            break;
    }
    throw ValidationError("mock backends are scripted in code, not built from a config");
}

}  // namespace slicegraph::llm
