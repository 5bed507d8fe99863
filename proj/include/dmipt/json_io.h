// Copyright 2026 The dmipt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DMIPT_JSON_IO_H
#define DMIPT_JSON_IO_H

#include "json.hpp"

#include "dmipt/ensemble.h"
#include "dmipt/scaling.h"

namespace dmipt {

nlohmann::json to_json(const RunSpec &spec);
RunSpec run_spec_from_json(const nlohmann::json &j);

nlohmann::json to_json(const ScalingConstants &c);

}  // namespace dmipt

#endif
