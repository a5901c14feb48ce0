// Copyright 2026 The pickcell Authors
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

#include <chrono>
#include <memory>
#include <string>

#include "hmi/hmi_service.hpp"

namespace httplib {
class Server;
}

namespace pickcell::hmi {

struct HttpOptions {
  std::chrono::milliseconds keepalive{1000};  // idle stream gets a heartbeat snapshot this often
};

class HttpServer {
 public:
  explicit HttpServer(HmiService& service, HttpOptions opts = {});
  ~HttpServer();

  /// Binds; returns the port (an ephemeral one when `port` is 0).
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void serve();
  void stop();

 private:
  HmiService& service_;
  HttpOptions opts_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace pickcell::hmi
