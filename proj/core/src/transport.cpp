#include "ccrm/transport.hpp"

#include <algorithm>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "ccrm/tsv.hpp"
#include "httplib.h"
#include "json.hpp"

namespace ccrm::ingest {

namespace fs = std::filesystem;
using nlohmann::json;

std::string url_origin(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return {};
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") return {};
  const auto host_start = scheme_end + 3;
  const auto path_start = url.find_first_of("/?#", host_start);
  const auto origin = url.substr(0, path_start);
  return origin.size() > host_start ? origin : std::string{};
}

std::string url_host(const std::string& url) {
  const auto origin = url_origin(url);
  if (origin.empty()) return {};
  auto host = origin.substr(origin.find("://") + 3);
  if (const auto at = host.rfind('@'); at != std::string::npos) host = host.substr(at + 1);
  if (const auto colon = host.find(':'); colon != std::string::npos) host = host.substr(0, colon);
  return host;
}

std::string percent_encode(const std::string& text) {
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out += fmt::format("%{:02X}", c);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

HttpTransport::HttpTransport(int timeout_ms, std::string user_agent)
    : timeout_ms_(timeout_ms), user_agent_(std::move(user_agent)) {}

HttpResponse HttpTransport::get(const std::string& url) {
  const auto origin = url_origin(url);
  if (origin.empty()) throw NetworkError(fmt::format("not an http(s) URL: {}", url));
  auto path = url.substr(origin.size());
  if (path.empty()) path = "/";

  httplib::Client client(origin);
  const auto seconds = timeout_ms_ / 1000;
  const auto micros = (timeout_ms_ % 1000) * 1000;
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_follow_location(false);
  auto result = client.Get(path, {{"User-Agent", user_agent_}});
  if (!result) {
    throw TransportError(fmt::format("GET {} failed: {}", url, httplib::to_string(result.error())));
  }
  HttpResponse out;
  out.status = result->status;
  out.body = result->body;
  for (const auto& [name, value] : result->headers) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    out.headers[lower] = value;
  }
  return out;
}

// ---------------------------------------------------------------------------

Cassette Cassette::from_json_text(const std::string& text, const std::string& source) {
  try {
    const auto j = json::parse(text);
    Cassette c;
    c.url = j.at("request").at("url").get<std::string>();
    c.response.status = j.at("status").get<int>();
    c.response.body = j.at("body").get<std::string>();
    if (j.contains("headers")) {
      for (const auto& [k, v] : j.at("headers").items()) {
        std::string lower = k;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
        c.response.headers[lower] = v.get<std::string>();
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw ParseError(source, 1, 1, e.what());
  }
}

std::string Cassette::to_json_text() const {
  json j;
  j["request"]["url"] = url;
  j["status"] = response.status;
  j["headers"] = response.headers;
  j["body"] = response.body;
  return j.dump(2) + "\n";
}

ReplayTransport ReplayTransport::from_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IOError(fmt::format("cassette directory {} does not exist", dir.string()));
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (name.size() >= 14 && name.ends_with(".expected.json")) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  ReplayTransport replay;
  for (const auto& f : files) replay.add(Cassette::from_json_text(tsv::read_file(f), f.filename().string()));
  return replay;
}

void ReplayTransport::add(Cassette cassette) {
  auto [it, inserted] = cassettes_.emplace(cassette.url, std::move(cassette.response));
  if (!inserted) throw Error(fmt::format("two cassettes record the same URL: {}", it->first));
}

HttpResponse ReplayTransport::get(const std::string& url) {
  auto it = cassettes_.find(url);
  if (it == cassettes_.end()) throw NetworkError(fmt::format("no recorded response for {}", url));
  return it->second;
}

RecordingTransport::RecordingTransport(Transport& inner, fs::path dir) : inner_(inner), dir_(std::move(dir)) {}

HttpResponse RecordingTransport::get(const std::string& url) {
  auto response = inner_.get(url);
  Cassette c{url, response};
  std::lock_guard lock(mu_);
  tsv::write_file(dir_ / (cassette_name(url) + ".json"), c.to_json_text());
  return response;
}

std::string cassette_name(const std::string& url) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : url) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

// ---------------------------------------------------------------------------

Clock::time_point SystemClock::now() { return std::chrono::steady_clock::now(); }

void SystemClock::sleep_for(std::chrono::milliseconds d) {
  if (d.count() > 0) std::this_thread::sleep_for(d);
}

Clock::time_point ManualClock::now() {
  std::lock_guard lock(mu_);
  return t_;
}

void ManualClock::sleep_for(std::chrono::milliseconds d) {
  if (d.count() <= 0) return;
  std::lock_guard lock(mu_);
  t_ += d;
  slept_ += d;
}

std::chrono::milliseconds ManualClock::slept() const {
  std::lock_guard lock(mu_);
  return slept_;
}

}  // namespace ccrm::ingest
