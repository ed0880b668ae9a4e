/*
 * Copyright 2026 The erpvis Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "erpvis/log.hpp"

#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace erpvis::log {
namespace {

spdlog::level::level_enum ToSpd(Level level) {
  switch (level) {
    case Level::kError:
      return spdlog::level::err;
    case Level::kDebug:
      return spdlog::level::debug;
    case Level::kInfo:
    default:
      return spdlog::level::info;
  }
}

spdlog::logger& Logger() {
  static std::once_flag once;
  static std::shared_ptr<spdlog::logger> logger;
  std::call_once(once, [] {
    logger = spdlog::stderr_color_mt("erpvis");
    logger->set_pattern("[%l] %v");
    logger->set_level(ToSpd(LevelFromEnv()));
  });
  return *logger;
}

}  // namespace

Level LevelFromEnv() {
  const char* env = std::getenv("ERPVIS_LOG");
  if (env == nullptr) return Level::kInfo;
  const std::string value(env);
  if (value == "error") return Level::kError;
  if (value == "debug") return Level::kDebug;
  return Level::kInfo;
}

void SetLevel(Level level) { Logger().set_level(ToSpd(level)); }

void Error(std::string_view message) { Logger().error(message); }
void Warn(std::string_view message) { Logger().warn(message); }
void Info(std::string_view message) { Logger().info(message); }
void Debug(std::string_view message) { Logger().debug(message); }

}  // namespace erpvis::log
