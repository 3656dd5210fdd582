#pragma once

#include "core.hpp"
#include "spectral.hpp"
#include "measurement.hpp"
#include "dilation.hpp"
#include "sampler.hpp"
#include "uncertainty.hpp"
#include "fixtures.hpp"
