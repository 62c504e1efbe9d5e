/*
 * Copyright 2026 The oodkit authors.
 *
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

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oodkit/errors.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const oodkit::cli::CommandPlan plan = oodkit::cli::parse_command(args);
    return oodkit::cli::execute(plan);
  } catch (const oodkit::UsageError& e) {
    std::cerr << "oodkit: " << e.what() << "\n\n" << oodkit::cli::usage_text();
    return 2;
  } catch (const oodkit::Error& e) {
    std::cerr << "oodkit: error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "oodkit: internal error: " << e.what() << "\n";
    return 1;
  }
}
