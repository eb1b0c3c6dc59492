// Copyright 2026 The Actipol Authors
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

// Debug CLI for the reference decision procedure:
//
//   actipol-oracle decide --world fixture.json --subject sowing --phase pre
//
// Prints the verdict on the first line and the post-decision world as JSON
// on the remaining lines.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "acoracle/oracle.hpp"

namespace {

int usage(std::ostream& out, int code) {
  out << "usage: actipol-oracle decide --world FILE --subject ID --phase "
         "pre|ongoing|post [--depth N]\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  std::string world_path;
  std::string subject;
  std::string phase;
  int depth = 2;

  if (argc < 2 || std::string(argv[1]) != "decide") {
    return usage(std::cerr, 2);
  }
  for (int i = 2; i < argc; ++i) {
    std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "missing value for " << arg << "\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--world") {
      world_path = next();
    } else if (arg == "--subject") {
      subject = next();
    } else if (arg == "--phase") {
      phase = next();
    } else if (arg == "--depth") {
      depth = std::stoi(next());
    } else if (arg == "--help" || arg == "-h") {
      return usage(std::cout, 0);
    } else {
      std::cerr << "unknown argument: " << arg << "\n";
      return usage(std::cerr, 2);
    }
  }
  if (world_path.empty() || subject.empty() || phase.empty()) {
    return usage(std::cerr, 2);
  }

  std::ifstream in(world_path);
  if (!in) {
    std::cerr << "cannot open " << world_path << "\n";
    return 1;
  }
  std::ostringstream buf;
  buf << in.rdbuf();

  try {
    acoracle::World world = acoracle::world_from_json(buf.str());
    acoracle::Outcome outcome =
        acoracle::oracle_decide(std::move(world), subject, phase, depth);
    std::cout << acoracle::verdict_name(outcome.verdict) << "\n";
    std::cout << acoracle::world_to_json(outcome.world) << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
