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

#include <string>

#include "json.hpp"
#include "seqrec/embedding.hpp"

namespace seqrec {

// POSTs a JSON body and returns the parsed JSON response. Connection
// failures, 429 and 5xx responses are retried with exponential backoff;
// other statuses fail at once. Throws TransportError carrying the number of
// attempts made.
nlohmann::json post_json(const std::string& base_url, const std::string& path,
                         const nlohmann::json& body, const RetryPolicy& retry);

nlohmann::json get_json(const std::string& base_url, const std::string& path,
                        const RetryPolicy& retry);

// GET /healthz. Throws ContractError unless the body is a JSON object.
nlohmann::json sidecar_health(const std::string& base_url, const RetryPolicy& retry);

}  // namespace seqrec
