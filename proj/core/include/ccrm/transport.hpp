#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ccrm/error.hpp"

namespace ccrm::ingest {

// Final failure of a request, after retries. Also thrown directly for
// conditions no retry can fix (no recorded response, malformed payload).
class NetworkError : public Error {
 public:
  using Error::Error;
};

// Transient failure reported by a transport (connection reset, timeout). The
// fetcher retries these.
class TransportError : public Error {
 public:
  using Error::Error;
};

struct HttpResponse {
  int status = 0;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse get(const std::string& url) = 0;
};

// Live HTTP(S) via cpp-httplib. Follows no redirects; timeouts in ms.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(int timeout_ms = 30000, std::string user_agent = "ccrm/0.1");
  HttpResponse get(const std::string& url) override;

 private:
  int timeout_ms_;
  std::string user_agent_;
};

/// One recorded request/response pair. On disk, one JSON file per request:
///
///   {"request": {"url": ...}, "status": 200, "headers": {...}, "body": "..."}
struct Cassette {
  std::string url;
  HttpResponse response;

  static Cassette from_json_text(const std::string& text, const std::string& source);
  std::string to_json_text() const;
};

// Serves recorded responses by exact URL. Unknown URLs throw NetworkError.
class ReplayTransport : public Transport {
 public:
  ReplayTransport() = default;
  // Loads every *.json file in `dir` except *.expected.json sidecars.
  static ReplayTransport from_directory(const std::filesystem::path& dir);

  void add(Cassette cassette);
  std::size_t size() const { return cassettes_.size(); }
  HttpResponse get(const std::string& url) override;

 private:
  std::map<std::string, HttpResponse> cassettes_;
};

// Forwards to another transport and writes every exchange as a cassette.
class RecordingTransport : public Transport {
 public:
  RecordingTransport(Transport& inner, std::filesystem::path dir);
  HttpResponse get(const std::string& url) override;

 private:
  Transport& inner_;
  std::filesystem::path dir_;
  std::mutex mu_;
};

// File name used for a recorded URL: 16 hex digits of its FNV-1a hash.
std::string cassette_name(const std::string& url);

class Clock {
 public:
  using time_point = std::chrono::steady_clock::time_point;
  virtual ~Clock() = default;
  virtual time_point now() = 0;
  virtual void sleep_for(std::chrono::milliseconds d) = 0;
};

class SystemClock : public Clock {
 public:
  time_point now() override;
  void sleep_for(std::chrono::milliseconds d) override;
};

// Virtual time: sleeping advances the clock instantly.
class ManualClock : public Clock {
 public:
  time_point now() override;
  void sleep_for(std::chrono::milliseconds d) override;
  std::chrono::milliseconds slept() const;

 private:
  mutable std::mutex mu_;
  time_point t_{};
  std::chrono::milliseconds slept_{0};
};

// Scheme plus authority of an http(s) URL ("https://fr.wikipedia.org"), or
// empty when the URL is not absolute http(s).
std::string url_origin(const std::string& url);
std::string url_host(const std::string& url);

// Percent-encodes everything outside the RFC 3986 unreserved set.
std::string percent_encode(const std::string& text);

}  // namespace ccrm::ingest
