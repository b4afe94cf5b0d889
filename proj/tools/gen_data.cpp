// Copyright 2026 The sharecheck Authors
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

// Regenerates the demo inputs under the data directory from the builders.
// Usage: gen_data [data-dir]

#include <filesystem>
#include <fstream>
#include <iostream>

#include "sharecheck/cli.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : sharecheck::default_data_dir();
  for (const auto& [rel, content] : sharecheck::demo_files()) {
    const auto path = dir / rel;
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    out << content.dump(2) << "\n";
    if (!out) {
      std::cerr << "cannot write " << path << "\n";
      return 1;
    }
    std::cout << path.string() << "\n";
  }
  return 0;
}
