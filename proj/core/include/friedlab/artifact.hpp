// Copyright 2026 The friedlab Authors.
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

#ifndef FRIEDLAB_ARTIFACT_HPP_
#define FRIEDLAB_ARTIFACT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace friedlab {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Shortest text that parses back to the same double.
std::string format_double(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

  // Throws Error(kPrecondition) when the width does not match the header.
  void add_row(std::vector<std::string> cells);
  void add_numeric_row(const std::vector<double>& cells);

  std::string str() const;

  static CsvTable parse(std::string_view text);
  static CsvTable read(const std::filesystem::path& path);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct ArtifactRecord {
  std::string name;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

// Writes content to dir/name (creating dir) and hashes it.
ArtifactRecord write_artifact(const std::filesystem::path& dir, const std::string& name,
                              const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace friedlab

#endif  // FRIEDLAB_ARTIFACT_HPP_
