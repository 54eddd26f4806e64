/*
 * Copyright 2026 The belltrace authors
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

#ifndef BELLTRACE_CLI_HPP
#define BELLTRACE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace belltrace::cli {

// Runs the full command line (argv without the program name) against the
// given streams and returns the process exit code:
//   0  success
//   2  usage / configuration errors
//   3  data and schema errors
//   4  numeric, training, or sampling failures
//   5  search completed but the model's claim was refuted
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace belltrace::cli

#endif  // BELLTRACE_CLI_HPP
