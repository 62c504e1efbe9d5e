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

#ifndef OODKIT_FSIO_HPP_
#define OODKIT_FSIO_HPP_

#include <string>

namespace oodkit {

// Writes bytes to path via a temp file + rename, so readers never observe a
// partial file. Throws IoError on failure.
void atomic_write_file(const std::string& path, const std::string& bytes);

// Whole-file read. Throws IoError if the file is missing or unreadable.
std::string read_file(const std::string& path);

bool file_exists(const std::string& path);

}  // namespace oodkit

#endif  // OODKIT_FSIO_HPP_
