// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "kvwave/config.hpp"
#include "kvwave/csv.hpp"
#include "kvwave/discretize.hpp"
#include "kvwave/errors.hpp"
#include "kvwave/evolve.hpp"
#include "kvwave/model.hpp"
#include "kvwave/spectra.hpp"
