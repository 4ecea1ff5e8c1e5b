#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "sheafcheck/error.hpp"
#include "sheafcheck/oracle.hpp"

namespace sheafcheck::oracle {

using nlohmann::json;

std::string request_body(const ChatRequest& request) {
  json body;
  body["model"] = request.model;
  body["messages"] = json::array();
  for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  if (request.temperature) body["temperature"] = *request.temperature;
  return body.dump();
}

std::string parse_response_body(std::string_view body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw TransportFailure("response body is not JSON");
  try {
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    if (doc.contains("error")) throw TransportFailure("endpoint error: " + doc["error"].dump());
    throw TransportFailure("response has no choices[0].message.content");
  }
}

// HTTP -------------------------------------------------------------------------------

HttpChatTransport::HttpChatTransport(std::string endpoint, std::string api_key, double timeout_seconds)
    : api_key_(std::move(api_key)), timeout_seconds_(timeout_seconds) {
  while (!endpoint.empty() && endpoint.back() == '/') endpoint.pop_back();
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw InputError("endpoint '" + endpoint + "' has no scheme");
  const auto scheme = endpoint.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw InputError("endpoint scheme must be http or https");
  const auto path_start = endpoint.find('/', scheme_end + 3);
  base_ = endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "" : endpoint.substr(path_start);
}

std::unique_ptr<HttpChatTransport> HttpChatTransport::from_environment(const OracleConfig& config) {
  const char* key = std::getenv(kApiKeyVariable);
  if (!key || !*key) throw EnvironmentError(std::string(kApiKeyVariable) + " is not set; live rating needs an API key");
  return std::make_unique<HttpChatTransport>(config.endpoint, key, config.timeout_seconds);
}

std::string HttpChatTransport::complete(const ChatRequest& request) {
  httplib::Client client(base_);
  const auto secs = static_cast<time_t>(timeout_seconds_);
  const auto usecs = static_cast<time_t>((timeout_seconds_ - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_bearer_token_auth(api_key_);

  auto res = client.Post(path_ + "/chat/completions", request_body(request), "application/json");
  if (!res) throw TransportFailure("request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw TransportFailure("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  return parse_response_body(res->body);
}

// Fixtures ------------------------------------------------------------------------------

namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string find_user_message(const ChatRequest& r) {
  for (auto it = r.messages.rbegin(); it != r.messages.rend(); ++it)
    if (it->role == "user") return it->content;
  throw InputError("request has no user message");
}

}  // namespace

std::string pair_hash(const ClaimText& a, const ClaimText& b) { return hex64(fnv1a64(user_message(a, b))); }

FixtureTransport::FixtureTransport(std::filesystem::path directory) : directory_(std::move(directory)) {
  if (!std::filesystem::is_directory(directory_))
    throw InputError("fixture directory '" + directory_.string() + "' does not exist");
}

std::string FixtureTransport::complete(const ChatRequest& request) {
  const auto message = find_user_message(request);
  const auto h = fnv1a64(message);
  const auto path = directory_ / (hex64(h) + ".json");
  std::ifstream in(path);
  if (!in) throw InputError("no mock reply fixture " + path.string() + " for query: " + message);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw InputError(path.string() + ": not valid JSON");

  const json* spec = &doc;
  if (doc.contains("models") && doc["models"].contains(request.model)) spec = &doc["models"][request.model];

  std::vector<std::string> pool;
  try {
    for (const auto& r : spec->at("replies")) {
      const auto weight = r.value("weight", 1);
      if (weight < 0) throw InputError(path.string() + ": negative reply weight");
      for (int k = 0; k < weight; ++k) pool.push_back(r.at("text").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (pool.empty()) throw InputError(path.string() + ": no replies");

  const auto mode = spec->value("mode", doc.value("mode", std::string("cycle")));
  if (mode == "cycle") return pool[request.call_index % pool.size()];
  if (mode == "sample") {
    const auto r = splitmix64(request.seed ^ splitmix64(h ^ splitmix64(request.call_index)));
    return pool[r % pool.size()];
  }
  throw InputError(path.string() + ": unknown mode '" + mode + "'");
}

}  // namespace sheafcheck::oracle
