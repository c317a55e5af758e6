#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace stsg {

// Whether a template is answered against a keyframe image, a clip video, or
// text only. Mirrors the media each parsing step sees.
enum class MediaSlot { None, Keyframe, Clip };

struct PromptTemplate {
  std::string id;
  std::string text;  // contains {placeholder} slots
  MediaSlot media = MediaSlot::None;
};

class TemplateRegistry {
 public:
  // The built-in set: the full parsing/merging/bridging/refinement suite.
  static TemplateRegistry builtin();

  void add(PromptTemplate tmpl);
  bool contains(const std::string& id) const;
  const PromptTemplate& get(const std::string& id) const;  // throws unknown-template
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, PromptTemplate> templates_;
};

// Substitutes {name} placeholders; a missing binding raises
// "missing-binding:<name>". Brace spans that are not bare identifiers
// (e.g. JSON snippets) pass through untouched.
std::string render_template_text(const std::string& text,
                                 const std::map<std::string, std::string>& bindings);

struct ModelRequest {
  std::string template_id;
  std::map<std::string, std::string> bindings;
  std::vector<std::string> image_refs;  // keyframe/clip identifiers, in order
  std::string model_id;
  double temperature = 0.0;
  std::string prompt_suffix;  // appended after rendering; used by parse retries
};

struct ModelResponse {
  std::string text;
  bool cached = false;
  double latency_ms = 0.0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  // Returns raw response text. Throws TransportError for retryable transport
  // failures and Error for terminal ones (e.g. backend refusal).
  virtual std::string complete(const std::string& prompt, const ModelRequest& request) = 0;
};

// Replays canned responses. Rules match either an exact request digest or an
// ECMAScript regex searched against the rendered prompt; first match wins.
// Performs no network activity by construction.
class MockBackend : public Backend {
 public:
  struct Rule {
    std::string digest;  // exact digest match when non-empty
    std::string regex;   // otherwise regex search on the prompt
    std::string response;
  };

  static std::unique_ptr<MockBackend> from_file(const std::filesystem::path& path);
  static std::unique_ptr<MockBackend> from_json_text(const std::string& text);

  void add_digest_rule(std::string digest, std::string response);
  void add_regex_rule(std::string pattern, std::string response);

  std::string name() const override { return "mock"; }
  std::string complete(const std::string& prompt, const ModelRequest& request) override;

 private:
  struct CompiledRule;
  std::vector<CompiledRule> rules_;
};

// Chat-completion HTTP transport. POSTs to {endpoint}/v1/chat/completions with
// a message array and image attachments by reference; expects {"text": ...}
// or an OpenAI-style choices array.
class HttpBackend : public Backend {
 public:
  struct Options {
    std::string endpoint;  // scheme://host[:port]
    std::string api_key;
    std::chrono::milliseconds timeout{30000};
  };

  explicit HttpBackend(Options options);

  std::string name() const override { return "http"; }
  std::string complete(const std::string& prompt, const ModelRequest& request) override;

  // Process-wide count of network attempts; lets tests assert that mock runs
  // stay offline.
  static std::uint64_t network_attempts();

 private:
  Options options_;
  static std::atomic<std::uint64_t> attempts_;
};

// Content-addressed on-disk response store. Writes are atomic
// (write-to-temp then rename), safe for concurrent readers and writers.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<std::string> get(const std::string& digest) const;
  void put(const std::string& digest, const std::string& prompt,
           const std::string& response) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct GatewayOptions {
  std::string model_id = "mock-model";
  double temperature = 0.0;
  int max_retries = 2;  // upstream retries after the first attempt
  std::chrono::milliseconds initial_backoff{25};
  double backoff_factor = 2.0;
  std::optional<std::filesystem::path> cache_dir;  // absent -> memory cache only
};

struct AuditRecord {
  std::string template_id;
  std::string digest;
  std::string response;
  bool cached = false;
};

// The single entry point for model contact: rendering, caching, retries.
// Thread-safe for concurrent complete() calls.
class GatewayClient {
 public:
  GatewayClient(TemplateRegistry registry, std::unique_ptr<Backend> backend,
                GatewayOptions options);

  std::string render_prompt(const std::string& template_id,
                            const std::map<std::string, std::string>& bindings) const;

  ModelRequest make_request(const std::string& template_id,
                            std::map<std::string, std::string> bindings,
                            std::vector<std::string> image_refs = {}) const;

  ModelResponse complete(const ModelRequest& request);

  std::string request_digest(const ModelRequest& request) const;
  static std::string compute_digest(const std::string& model_id, const std::string& prompt,
                                    const std::vector<std::string>& image_refs,
                                    double temperature);

  const TemplateRegistry& registry() const { return registry_; }
  const GatewayOptions& options() const { return options_; }
  std::uint64_t upstream_calls() const { return upstream_calls_.load(); }

  void set_audit_sink(std::function<void(const AuditRecord&)> sink);

 private:
  TemplateRegistry registry_;
  std::unique_ptr<Backend> backend_;
  GatewayOptions options_;
  std::optional<ResponseCache> disk_cache_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> memory_cache_;
  std::atomic<std::uint64_t> upstream_calls_{0};
  std::function<void(const AuditRecord&)> audit_sink_;
};

}  // namespace stsg
