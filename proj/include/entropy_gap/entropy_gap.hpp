// Copyright 2026 The entropy-gap Authors
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

#include "entropy_gap/critical_times.hpp"
#include "entropy_gap/errors.hpp"
#include "entropy_gap/gap_model.hpp"
#include "entropy_gap/quantities.hpp"
#include "entropy_gap/spectral_oracle.hpp"
#include "entropy_gap/units.hpp"
