#pragma once

#include "remo/fixtures.hpp"
#include "remo/metrics.hpp"
