// include/phonoprobe/cli.h

// Copyright 2026 The phonoprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PHONOPROBE_CLI_H_
#define PHONOPROBE_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace phonoprobe {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;

/// Entry point of the `phonoprobe` tool. args[0] is the program name.
/// Subcommands: validate, probe-train, analyze, metrics, report, make-fixture.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace phonoprobe

#endif  // PHONOPROBE_CLI_H_
