#include "stsg/gateway.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "stsg/digest.hpp"
#include "stsg/error.hpp"

#define CPPHTTPLIB_NO_EXCEPTIONS_IN_HEADER_ONLY_IMPL
#include <httplib.h>

namespace stsg {

void TemplateRegistry::add(PromptTemplate tmpl) {
  templates_[tmpl.id] = std::move(tmpl);
}

bool TemplateRegistry::contains(const std::string& id) const {
  return templates_.count(id) != 0;
}

const PromptTemplate& TemplateRegistry::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) {
    throw Error("unknown-template", "no template registered under id '" + id + "'");
  }
  return it->second;
}

std::vector<std::string> TemplateRegistry::ids() const {
  std::vector<std::string> out;
  out.reserve(templates_.size());
  for (const auto& [id, _] : templates_) out.push_back(id);
  return out;
}

std::string render_template_text(const std::string& text,
                                 const std::map<std::string, std::string>& bindings) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '{') {
      out.push_back(text[i]);
      ++i;
      continue;
    }
    std::size_t close = text.find('}', i + 1);
    bool is_placeholder = close != std::string::npos && close > i + 1;
    if (is_placeholder) {
      for (std::size_t j = i + 1; j < close; ++j) {
        unsigned char c = static_cast<unsigned char>(text[j]);
        if (!(std::islower(c) || std::isdigit(c) || c == '_')) {
          is_placeholder = false;
          break;
        }
      }
    }
    if (!is_placeholder) {
      out.push_back(text[i]);
      ++i;
      continue;
    }
    std::string name = text.substr(i + 1, close - i - 1);
    auto it = bindings.find(name);
    if (it == bindings.end()) {
      throw Error("missing-binding:" + name, "template placeholder '" + name +
                                                 "' has no binding");
    }
    out += it->second;
    i = close + 1;
  }
  return out;
}

// ------------------------------------------------------------------ MockBackend

struct MockBackend::CompiledRule {
  std::string digest;
  std::optional<std::regex> pattern;
  std::string response;
};

std::unique_ptr<MockBackend> MockBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("io:open", "cannot open mock fixture file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::unique_ptr<MockBackend> MockBackend::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("mock:bad-fixture", std::string("fixture is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error("mock:bad-fixture", "fixture must be a JSON array");
  auto backend = std::make_unique<MockBackend>();
  for (const auto& entry : doc) {
    if (!entry.contains("response")) {
      throw Error("mock:bad-fixture", "fixture record lacks 'response'");
    }
    std::string response = entry.at("response").get<std::string>();
    if (entry.contains("digest")) {
      backend->add_digest_rule(entry.at("digest").get<std::string>(), response);
    } else if (entry.contains("regex")) {
      backend->add_regex_rule(entry.at("regex").get<std::string>(), response);
    } else {
      throw Error("mock:bad-fixture", "fixture record needs 'digest' or 'regex'");
    }
  }
  return backend;
}

void MockBackend::add_digest_rule(std::string digest, std::string response) {
  CompiledRule rule;
  rule.digest = std::move(digest);
  rule.response = std::move(response);
  rules_.push_back(std::move(rule));
}

void MockBackend::add_regex_rule(std::string pattern, std::string response) {
  CompiledRule rule;
  try {
    rule.pattern.emplace(pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw Error("mock:bad-fixture", "invalid fixture regex '" + pattern + "': " + e.what());
  }
  rule.response = std::move(response);
  rules_.push_back(std::move(rule));
}

std::string MockBackend::complete(const std::string& prompt, const ModelRequest& request) {
  std::string digest = GatewayClient::compute_digest(request.model_id, prompt,
                                                     request.image_refs, request.temperature);
  for (const auto& rule : rules_) {
    if (!rule.digest.empty()) {
      if (rule.digest == digest) return rule.response;
    } else if (rule.pattern && std::regex_search(prompt, *rule.pattern)) {
      return rule.response;
    }
  }
  std::string head = prompt.substr(0, 160);
  throw Error("mock:no-fixture",
              "no fixture rule matches request (template=" + request.template_id +
                  ", digest=" + digest + ", prompt head: " + head + ")");
}

// ------------------------------------------------------------------ HttpBackend

std::atomic<std::uint64_t> HttpBackend::attempts_{0};

HttpBackend::HttpBackend(Options options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) {
    throw ConfigError("config:missing:endpoint", "http backend requires an endpoint");
  }
}

std::uint64_t HttpBackend::network_attempts() { return attempts_.load(); }

std::string HttpBackend::complete(const std::string& prompt, const ModelRequest& request) {
  attempts_.fetch_add(1);

  nlohmann::json content = nlohmann::json::array();
  content.push_back({{"type", "text"}, {"text", prompt}});
  for (const auto& ref : request.image_refs) {
    content.push_back({{"type", "image_ref"}, {"ref", ref}});
  }
  nlohmann::json body = {
      {"model", request.model_id},
      {"temperature", request.temperature},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", content}}})},
  };

  httplib::Client client(options_.endpoint);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
      options_.timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(options_.timeout));
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }

  auto result = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
  if (!result) {
    throw TransportError("http request failed: " + httplib::to_string(result.error()), 1);
  }
  if (result->status < 200 || result->status >= 300) {
    throw TransportError("http status " + std::to_string(result->status) + ": " +
                             result->body.substr(0, 200),
                         1);
  }

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(result->body);
  } catch (const nlohmann::json::parse_error&) {
    throw TransportError("backend returned non-JSON body", 1);
  }
  if (reply.contains("error")) {
    throw Error("backend-refusal", reply.dump());
  }
  if (reply.contains("text") && reply.at("text").is_string()) {
    return reply.at("text").get<std::string>();
  }
  if (reply.contains("choices") && reply.at("choices").is_array() &&
      !reply.at("choices").empty()) {
    const auto& first = reply.at("choices").front();
    if (first.contains("message") && first.at("message").contains("content")) {
      return first.at("message").at("content").get<std::string>();
    }
  }
  throw Error("backend-refusal", "response carries no completion text: " + result->body);
}

// ------------------------------------------------------------------ ResponseCache

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::optional<std::string> ResponseCache::get(const std::string& digest) const {
  auto path = dir_ / digest.substr(0, 2) / (digest + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error&) {
    return std::nullopt;  // torn write; treat as miss
  }
  if (!doc.contains("response")) return std::nullopt;
  return doc.at("response").get<std::string>();
}

void ResponseCache::put(const std::string& digest, const std::string& prompt,
                        const std::string& response) const {
  auto bucket = dir_ / digest.substr(0, 2);
  std::filesystem::create_directories(bucket);
  auto final_path = bucket / (digest + ".json");
  auto tmp_path = bucket / (digest + ".tmp." +
                            std::to_string(static_cast<std::uint64_t>(
                                std::hash<std::thread::id>{}(std::this_thread::get_id()))));
  nlohmann::ordered_json doc{{"digest", digest}, {"prompt", prompt}, {"response", response}};
  {
    std::ofstream out(tmp_path);
    if (!out) throw IoError("io:open", "cannot write cache entry: " + tmp_path.string());
    out << doc.dump(2) << '\n';
  }
  std::error_code ec;
  std::filesystem::rename(tmp_path, final_path, ec);
  if (ec) {
    std::filesystem::remove(tmp_path, ec);
  }
}

// ------------------------------------------------------------------ GatewayClient

GatewayClient::GatewayClient(TemplateRegistry registry, std::unique_ptr<Backend> backend,
                             GatewayOptions options)
    : registry_(std::move(registry)), backend_(std::move(backend)),
      options_(std::move(options)) {
  if (!backend_) {
    throw ConfigError("config:missing:gateway", "gateway requires a backend");
  }
  if (options_.cache_dir) disk_cache_.emplace(*options_.cache_dir);
}

std::string GatewayClient::render_prompt(
    const std::string& template_id, const std::map<std::string, std::string>& bindings) const {
  const PromptTemplate& tmpl = registry_.get(template_id);
  return render_template_text(tmpl.text, bindings);
}

ModelRequest GatewayClient::make_request(const std::string& template_id,
                                         std::map<std::string, std::string> bindings,
                                         std::vector<std::string> image_refs) const {
  ModelRequest request;
  request.template_id = template_id;
  request.bindings = std::move(bindings);
  request.image_refs = std::move(image_refs);
  request.model_id = options_.model_id;
  request.temperature = options_.temperature;
  return request;
}

std::string GatewayClient::compute_digest(const std::string& model_id,
                                          const std::string& prompt,
                                          const std::vector<std::string>& image_refs,
                                          double temperature) {
  std::vector<std::string> fields{model_id, prompt};
  for (const auto& ref : image_refs) fields.push_back(ref);
  char temp_buf[32];
  std::snprintf(temp_buf, sizeof(temp_buf), "%.6f", temperature);
  fields.emplace_back(temp_buf);
  return sha256_hex_fields(fields);
}

std::string GatewayClient::request_digest(const ModelRequest& request) const {
  std::string prompt = render_prompt(request.template_id, request.bindings) +
                       request.prompt_suffix;
  return compute_digest(request.model_id, prompt, request.image_refs, request.temperature);
}

void GatewayClient::set_audit_sink(std::function<void(const AuditRecord&)> sink) {
  audit_sink_ = std::move(sink);
}

ModelResponse GatewayClient::complete(const ModelRequest& request) {
  const std::string prompt =
      render_prompt(request.template_id, request.bindings) + request.prompt_suffix;
  const std::string digest =
      compute_digest(request.model_id, prompt, request.image_refs, request.temperature);

  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = memory_cache_.find(digest);
    if (it != memory_cache_.end()) {
      ModelResponse response{it->second, true, 0.0};
      if (audit_sink_) audit_sink_({request.template_id, digest, response.text, true});
      return response;
    }
  }
  if (disk_cache_) {
    if (auto hit = disk_cache_->get(digest)) {
      std::lock_guard<std::mutex> lock(mutex_);
      memory_cache_[digest] = *hit;
      ModelResponse response{*hit, true, 0.0};
      if (audit_sink_) audit_sink_({request.template_id, digest, response.text, true});
      return response;
    }
  }

  const auto started = std::chrono::steady_clock::now();
  upstream_calls_.fetch_add(1);

  std::string text;
  int attempts = 0;
  auto backoff = options_.initial_backoff;
  while (true) {
    ++attempts;
    try {
      text = backend_->complete(prompt, request);
      break;
    } catch (const TransportError& e) {
      if (attempts > options_.max_retries) {
        throw TransportError("transport failed after " + std::to_string(attempts) +
                                 " attempts: " + e.what(),
                             attempts);
      }
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(static_cast<std::int64_t>(
          static_cast<double>(backoff.count()) * options_.backoff_factor));
    }
  }

  const auto elapsed = std::chrono::steady_clock::now() - started;
  ModelResponse response;
  response.text = text;
  response.cached = false;
  response.latency_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();

  {
    std::lock_guard<std::mutex> lock(mutex_);
    memory_cache_[digest] = text;
  }
  if (disk_cache_) disk_cache_->put(digest, prompt, text);
  if (audit_sink_) audit_sink_({request.template_id, digest, text, false});
  return response;
}

}  // namespace stsg
