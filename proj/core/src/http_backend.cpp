#include "ncemb/error.hpp"
#include "ncemb/paraphrase.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>

namespace ncemb {

namespace {

std::string substitute(std::string templ, const std::string& key, const std::string& value) {
  const std::string tag = "{" + key + "}";
  std::size_t pos = 0;
  while ((pos = templ.find(tag, pos)) != std::string::npos) {
    templ.replace(pos, tag.size(), value);
    pos += value.size();
  }
  return templ;
}

std::string url_encode(const std::string& text) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (const unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xf];
    }
  }
  return out;
}

class HttpTranslationBackend : public TranslationBackend {
public:
  explicit HttpTranslationBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw ConfigError("http backend: base_url is required");
    if (config_.endpoint_template.empty()) {
      throw ConfigError("http backend: endpoint_template is required");
    }
  }

  std::vector<std::string> translate(const std::string& text, const std::string& from_lang,
                                     const std::string& to_lang) override {
    httplib::Client client(config_.base_url);
    client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
    client.set_connection_timeout(config_.timeout_ms / 1000,
                                  (config_.timeout_ms % 1000) * 1000);

    httplib::Headers headers;
    if (!config_.auth_token_env.empty()) {
      const char* token = std::getenv(config_.auth_token_env.c_str());
      if (!token) {
        throw ConfigError("http backend: env var " + config_.auth_token_env + " is unset");
      }
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    std::string endpoint = substitute(config_.endpoint_template, "from", from_lang);
    endpoint = substitute(endpoint, "to", to_lang);
    endpoint = substitute(endpoint, "text", url_encode(text));

    const auto res = client.Get(endpoint, headers);
    if (!res) {
      throw Error("http backend: request to " + endpoint + " failed: " +
                  httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw Error("http backend: " + endpoint + " returned status " +
                  std::to_string(res->status));
    }

    nlohmann::json body;
    try {
      body = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("http backend: response is not JSON: ") + e.what());
    }
    const auto pointer = nlohmann::json::json_pointer(config_.response_json_pointer);
    if (!body.contains(pointer) || !body[pointer].is_array()) {
      throw ParseError("http backend: no string array at " + config_.response_json_pointer);
    }
    std::vector<std::string> candidates;
    for (const auto& item : body[pointer]) {
      if (!item.is_string()) {
        throw ParseError("http backend: non-string candidate in response");
      }
      candidates.push_back(item.get<std::string>());
    }
    return candidates;
  }

private:
  HttpBackendConfig config_;
};

} // namespace

std::unique_ptr<TranslationBackend> make_http_backend(HttpBackendConfig config) {
  return std::make_unique<HttpTranslationBackend>(std::move(config));
}

} // namespace ncemb
