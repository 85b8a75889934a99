#pragma once

#include "mfspec/errors.hpp"
#include "mfspec/extended_real.hpp"
#include "mfspec/potentials.hpp"
#include "mfspec/pressure.hpp"
#include "mfspec/temperature.hpp"
#include "mfspec/spectrum.hpp"
#include "mfspec/gauss.hpp"
#include "mfspec/oracle.hpp"
#include "mfspec/presets.hpp"
#include "mfspec/config.hpp"
#include "mfspec/experiment.hpp"
