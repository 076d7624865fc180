// Copyright 2026 The qmtest Authors
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

#pragma once

#include "qmtest/blackbox.hpp"
#include "qmtest/bounds.hpp"
#include "qmtest/core.hpp"
#include "qmtest/fixtures.hpp"
#include "qmtest/io.hpp"
#include "qmtest/metric.hpp"
#include "qmtest/pauli.hpp"
#include "qmtest/random.hpp"
#include "qmtest/schur.hpp"
#include "qmtest/testers.hpp"
