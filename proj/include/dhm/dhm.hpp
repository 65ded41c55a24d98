#pragma once

#include "dhm/anthro.hpp"
#include "dhm/cohort.hpp"
#include "dhm/errors.hpp"
#include "dhm/fatigue.hpp"
#include "dhm/io.hpp"
#include "dhm/skeleton.hpp"
#include "dhm/statics.hpp"
