#include "ncemb/error.hpp"
#include "ncemb/paraphrase.hpp"

#include <doctest.h>
#include <httplib.h>

#include <cstdlib>
#include <thread>

using namespace ncemb;

namespace {

struct LocalServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  LocalServer() {
    server.Get("/translate/en/fr",
               [](const httplib::Request& req, httplib::Response& res) {
                 if (req.get_param_value("q") == "baby%20oil" ||
                     req.get_param_value("q") == "baby oil") {
                   res.set_content(R"({"translations": ["huile pour bébé"]})",
                                   "application/json");
                 } else {
                   res.set_content(R"({"translations": []})", "application/json");
                 }
               });
    server.Get("/translate/fr/en",
               [](const httplib::Request&, httplib::Response& res) {
                 res.set_content(R"({"translations": ["oil for baby", "baby oil"]})",
                                 "application/json");
               });
    server.Get("/secured/en/fr", [](const httplib::Request& req, httplib::Response& res) {
      if (req.get_header_value("Authorization") != "Bearer sesame") {
        res.status = 403;
        return;
      }
      res.set_content(R"({"translations": ["ok"]})", "application/json");
    });
    server.Get("/broken/en/fr", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("not json at all", "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~LocalServer() {
    server.stop();
    thread.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

} // namespace

TEST_CASE("http backend follows the endpoint template and JSON pointer") {
  LocalServer server;
  HttpBackendConfig config;
  config.base_url = server.base_url();
  config.endpoint_template = "/translate/{from}/{to}?q={text}";
  auto backend = make_http_backend(config);

  const auto forward = backend->translate("baby oil", "en", "fr");
  CHECK(forward == std::vector<std::string>{"huile pour bébé"});
  const auto back = backend->translate("huile pour bébé", "fr", "en");
  CHECK(back == std::vector<std::string>{"oil for baby", "baby oil"});
}

TEST_CASE("http backend sends the bearer token from the configured env var") {
  LocalServer server;
  HttpBackendConfig config;
  config.base_url = server.base_url();
  config.endpoint_template = "/secured/{from}/{to}?q={text}";
  config.auth_token_env = "NCEMB_TEST_TOKEN";

  setenv("NCEMB_TEST_TOKEN", "sesame", 1);
  auto backend = make_http_backend(config);
  CHECK(backend->translate("x", "en", "fr") == std::vector<std::string>{"ok"});

  unsetenv("NCEMB_TEST_TOKEN");
  CHECK_THROWS_AS(backend->translate("x", "en", "fr"), ConfigError);
}

TEST_CASE("http backend surfaces transport and payload failures") {
  LocalServer server;
  SUBCASE("non-200 status") {
    HttpBackendConfig config;
    config.base_url = server.base_url();
    config.endpoint_template = "/missing/{from}/{to}";
    auto backend = make_http_backend(config);
    CHECK_THROWS_AS(backend->translate("x", "en", "fr"), Error);
  }
  SUBCASE("non-JSON body") {
    HttpBackendConfig config;
    config.base_url = server.base_url();
    config.endpoint_template = "/broken/{from}/{to}";
    auto backend = make_http_backend(config);
    CHECK_THROWS_AS(backend->translate("x", "en", "fr"), ParseError);
  }
  SUBCASE("missing base_url rejected at construction") {
    CHECK_THROWS_AS(make_http_backend(HttpBackendConfig{}), ConfigError);
  }
}
