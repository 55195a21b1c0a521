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

#include "seqrec/http_client.hpp"

#include <thread>

#include <fmt/core.h>

#include "httplib.h"
#include "seqrec/errors.hpp"

namespace seqrec {
namespace {

bool transient_status(int status) { return status == 429 || status >= 500; }

template <typename Call>
nlohmann::json with_retry(const std::string& base_url, const std::string& path,
                          const RetryPolicy& retry, Call&& call) {
  const int attempts = std::max(1, retry.attempts);
  auto backoff = retry.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    httplib::Client client(base_url);
    client.set_connection_timeout(retry.timeout);
    client.set_read_timeout(retry.timeout);
    client.set_write_timeout(retry.timeout);
    auto res = call(client);
    if (!res) {
      last_error = httplib::to_string(res.error());
    } else if (res->status == 200) {
      auto value = nlohmann::json::parse(res->body, nullptr, false);
      if (value.is_discarded()) {
        throw TransportError(fmt::format("{}{}: response is not JSON", base_url, path), attempt);
      }
      return value;
    } else if (!transient_status(res->status)) {
      throw TransportError(
          fmt::format("{}{}: HTTP {}: {}", base_url, path, res->status, res->body), attempt);
    } else {
      last_error = fmt::format("HTTP {}", res->status);
    }
    if (attempt < attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw TransportError(
      fmt::format("{}{}: failed after {} attempts ({})", base_url, path, attempts, last_error),
      attempts);
}

}  // namespace

nlohmann::json post_json(const std::string& base_url, const std::string& path,
                         const nlohmann::json& body, const RetryPolicy& retry) {
  const std::string payload = body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  return with_retry(base_url, path, retry, [&](httplib::Client& client) {
    return client.Post(path, payload, "application/json");
  });
}

nlohmann::json get_json(const std::string& base_url, const std::string& path,
                        const RetryPolicy& retry) {
  return with_retry(base_url, path, retry,
                    [&](httplib::Client& client) { return client.Get(path); });
}

nlohmann::json sidecar_health(const std::string& base_url, const RetryPolicy& retry) {
  auto health = get_json(base_url, "/healthz", retry);
  if (!health.is_object()) throw ContractError(fmt::format("{}/healthz: expected an object", base_url));
  return health;
}

}  // namespace seqrec
