#pragma once

// Umbrella header for the geospin library.

#include "geospin/config.hpp"
#include "geospin/constants.hpp"
#include "geospin/errors.hpp"
#include "geospin/faraday.hpp"
#include "geospin/geophase.hpp"
#include "geospin/harness.hpp"
#include "geospin/mat2.hpp"
#include "geospin/pulse.hpp"
#include "geospin/qstate.hpp"
#include "geospin/report.hpp"
#include "geospin/stark.hpp"
