// Copyright (c) 2026 The DebiasRec Authors. All Rights Reserved.
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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "debiasrec/config.hpp"
#include "debiasrec/synthsim.hpp"

namespace debiasrec {

// Bad configuration or command-line usage. Maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat "key = value" configuration shared by every command.
struct RunConfig {
  std::string profile = "paper";
  ModelConfig model;
  TrainConfig train;
  SimConfig sim;
  int min_count = 1;
  std::string pretrained_embeddings;       // optional "token v1 ... vD" file
  std::optional<std::int64_t> test_start;  // else read from the dataset's truth.txt
};

// Paper-scale hyperparameters.
RunConfig paper_profile();
// Small dims and a small simulator for one CPU core.
RunConfig desk_profile();
RunConfig profile_by_name(const std::string& name);

// Applies one assignment. Throws ConfigError naming the key when it is
// unknown or the value does not parse.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// Parses "key = value" lines ('#' starts a comment). A "profile" line selects
// the base profile and is applied before every other key.
RunConfig parse_run_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_run_config(const std::string& path);

// Every key, one per line, in a fixed order. parse_run_config(format(c)) == c.
std::string format_run_config(const RunConfig& cfg);

// Runs ModelConfig / TrainConfig / SimConfig validation, rethrowing as ConfigError.
void validate_run_config(const RunConfig& cfg);

}  // namespace debiasrec
