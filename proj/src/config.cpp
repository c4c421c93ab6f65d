// Copyright 2026 The polarproj Authors
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

#include "polarproj/config.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <set>
#include <string>

namespace polarproj {
namespace {

std::atomic<int> g_strict{-1};
std::atomic<int> g_threads{0};

std::mutex g_warn_mutex;

WarningHandler default_handler() {
  return [seen = std::set<std::string>{}](std::string_view message) mutable {
    auto key = std::string(message.substr(0, message.find(':')));
    if (seen.insert(key).second) std::cerr << "warning: " << message << '\n';
  };
}

WarningHandler& handler() {
  static WarningHandler h = default_handler();
  return h;
}

}  // namespace

bool strict_mode() {
  int v = g_strict.load(std::memory_order_relaxed);
  if (v < 0) {
    const char* env = std::getenv("POLARPROJ_STRICT");
    v = (env != nullptr && std::string(env) == "1") ? 1 : 0;
    int expected = -1;
    g_strict.compare_exchange_strong(expected, v);
    v = g_strict.load();
  }
  return v == 1;
}

void set_strict_mode(bool strict) { g_strict.store(strict ? 1 : 0); }

int thread_limit() { return g_threads.load(std::memory_order_relaxed); }

void set_thread_limit(int threads) { g_threads.store(threads < 0 ? 0 : threads); }

WarningHandler set_warning_handler(WarningHandler h) {
  std::lock_guard lock(g_warn_mutex);
  auto previous = std::move(handler());
  handler() = h ? std::move(h) : default_handler();
  return previous;
}

void warn(std::string_view message) {
  std::lock_guard lock(g_warn_mutex);
  handler()(message);
}

}  // namespace polarproj
