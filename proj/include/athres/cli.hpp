// Copyright 2026 The athres Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed
// under the License is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR
// CONDITIONS OF ANY KIND, either express or implied. See the License for the
// specific language governing permissions and limitations under the License.

#pragma once

namespace athres {

// Entry point for the `athres` command line tool. Exit codes: 0 for success /
// PASS reports, 1 for FAIL reports, 2 for usage errors.
int cli_main(int argc, char** argv);

}  // namespace athres
