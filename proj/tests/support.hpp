// Copyright 2026 The seqrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

// Eigen before httplib: the resolver headers define a `_res` macro.
#include "seqrec/corpus.hpp"
#include "seqrec/embedding.hpp"
#include "httplib.h"

namespace seqrec::testing {

inline Item make_item(std::string id, std::string title) {
  Item item;
  item.id = ItemId(std::move(id));
  item.title = std::move(title);
  return item;
}

inline std::vector<const Item*> pointers(const std::vector<Item>& items) {
  std::vector<const Item*> out;
  for (const auto& it : items) out.push_back(&it);
  return out;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("seqrec_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline RetryPolicy fast_retry(int attempts = 3) {
  RetryPolicy r;
  r.attempts = attempts;
  r.initial_backoff = std::chrono::milliseconds(1);
  r.timeout = std::chrono::seconds(5);
  return r;
}

// In-process HTTP server on an ephemeral loopback port.
class StubServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  StubServer() = default;
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;
  ~StubServer() { stop(); }

  void post(const std::string& path, Handler h) { server_.Post(path, std::move(h)); }
  void get(const std::string& path, Handler h) { server_.Get(path, std::move(h)); }

  void start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void stop() {
    if (thread_.joinable()) {
      server_.stop();
      thread_.join();
    }
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

inline std::filesystem::path fixture_dir() { return SEQREC_FIXTURE_DIR; }

}  // namespace seqrec::testing
