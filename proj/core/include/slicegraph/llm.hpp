// Copyright 2026 The SliceGraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicegraph/domain.hpp"
#include "slicegraph/error.hpp"

namespace slicegraph::llm {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role) noexcept;

struct ChatMessage {
    Role role = Role::User;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

void to_json(nlohmann::json& j, const ChatMessage& message);

// Digest of the message list, as stored in cassettes.
std::string prompt_digest(std::span<const ChatMessage> messages);

// ---------------------------------------------------------------------------
// Errors. Every backend failure derives from BackendError (CLI exit code 2).

class BackendError : public Error {
  public:
    using Error::Error;
};

class TransportError : public BackendError {
  public:
    using BackendError::BackendError;
};

class HttpStatusError : public BackendError {
  public:
    HttpStatusError(int status, const std::string& body)
        : BackendError("HTTP status " + std::to_string(status) + ": " + body.substr(0, 200)), status_(status) {}
    [[nodiscard]] int status() const noexcept { return status_; }

  private:
    int status_;
};

class CassetteError : public BackendError {
  public:
    using BackendError::BackendError;
};

class MockError : public BackendError {
  public:
    using BackendError::BackendError;
};

// ---------------------------------------------------------------------------

class Backend {
  public:
    virtual ~Backend() = default;
    // messages must be non-empty; system and user messages need content.
    virtual std::string complete(std::span<const ChatMessage> messages) = 0;
};

struct BackendConfig {
    enum class Kind { Http, Mock, Replay };

    Kind kind = Kind::Mock;
    std::string base_url;
    std::string model;
    double timeout_s = 60.0;
    int max_retries = 2;
    std::filesystem::path cassette_path;
};

// http needs base_url and model; replay needs cassette_path. Throws ValidationError.
void validate(const BackendConfig& config);
BackendConfig::Kind parse_backend_kind(std::string_view text);

// Scripted responses chosen by matchers over the last user message. Rules are
// checked in registration order; registration ends with freeze() (or the first
// complete()), after which the backend is read-only and safe to share.
class MockBackend final : public Backend {
  public:
    using Matcher = std::function<bool(std::string_view)>;
    using Responder = std::function<std::string(std::string_view)>;

    MockBackend& on_contains(std::string needle, std::string response);
    MockBackend& on(Matcher matcher, Responder responder);
    // Response when no rule matches. Without one, unmatched prompts throw MockError.
    MockBackend& otherwise(std::string response);
    void freeze();

    std::string complete(std::span<const ChatMessage> messages) override;

  private:
    struct Rule {
        Matcher matcher;
        Responder responder;
    };
    std::vector<Rule> rules_;
    std::optional<std::string> fallback_;
    std::atomic<bool> frozen_{false};
};

struct CassetteEntry {
    std::string prompt_digest;
    std::string response;

    bool operator==(const CassetteEntry&) const = default;
};

std::vector<CassetteEntry> load_cassette(const std::filesystem::path& path);

// Plays recorded responses back in order, refusing prompts that differ from the recording.
class ReplayBackend final : public Backend {
  public:
    explicit ReplayBackend(std::vector<CassetteEntry> entries) : entries_(std::move(entries)) {}
    explicit ReplayBackend(const std::filesystem::path& cassette) : ReplayBackend(load_cassette(cassette)) {}

    std::string complete(std::span<const ChatMessage> messages) override;
    [[nodiscard]] std::size_t remaining() const;

  private:
    mutable std::mutex mutex_;
    std::vector<CassetteEntry> entries_;
    std::size_t cursor_ = 0;
};

// Forwards to another backend and appends every exchange to a cassette file.
class RecordingBackend final : public Backend {
  public:
    RecordingBackend(Backend& inner, std::filesystem::path cassette);
    std::string complete(std::span<const ChatMessage> messages) override;

  private:
    Backend& inner_;
    std::filesystem::path cassette_;
    std::mutex mutex_;
};

// OpenAI-compatible POST {base_url}/chat/completions at temperature 0. Each
// attempt is bounded by timeout_s; failures are retried max_retries times.
class HttpBackend final : public Backend {
  public:
    // api_key defaults to $SLICEGRAPH_API_KEY.
    explicit HttpBackend(BackendConfig config, std::optional<std::string> api_key = std::nullopt);
    std::string complete(std::span<const ChatMessage> messages) override;

  private:
    BackendConfig config_;
    std::string scheme_host_port_;
    std::string path_prefix_;
    std::optional<std::string> api_key_;
};

inline constexpr const char* kApiKeyEnv = "SLICEGRAPH_API_KEY";

// http and replay backends. Mock backends are scripted in code; asking for one here throws ValidationError.
std::unique_ptr<Backend> make_backend(const BackendConfig& config);

// ---------------------------------------------------------------------------
// Structured output parsing

class IntentParseError : public Error {
  public:
    enum class Kind { NoJson, MissingField, BadSliceName, BadValue };

    IntentParseError(Kind kind, std::string field, const std::string& what)
        : Error(what), kind_(kind), field_(std::move(field)) {}
    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

  private:
    Kind kind_;
    std::string field_;
};

// First balanced JSON object in text (inside the first ``` fence when there is
// one). On failure a single repair pass strips trailing commas and normalizes
// slice-name case. Throws IntentParseError.
IntentLabel parse_intent(std::string_view text);

struct AllocationReply {
    SliceKind slice = SliceKind::Embb;
    double bandwidth_mhz = 0.0;

    bool operator==(const AllocationReply&) const = default;
};

// {"slice": ..., "bandwidth_mhz": ...} with the same extraction and repair rules.
AllocationReply parse_allocation(std::string_view text);

// Compact JSON that parse_intent reads back exactly.
std::string serialize_intent(const IntentLabel& intent);

}  // namespace slicegraph::llm
