// Copyright 2026 The thermodj Authors
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

#include "thermodj/config.hpp"
#include "thermodj/dj_engine.hpp"
#include "thermodj/heff.hpp"
#include "thermodj/oracle.hpp"
#include "thermodj/pulse_compiler.hpp"
#include "thermodj/pulse_program.hpp"
#include "thermodj/spectrum.hpp"
#include "thermodj/spin_algebra.hpp"
#include "thermodj/thermal.hpp"
