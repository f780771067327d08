#pragma once

#include "audioplace/analyzer.hpp"
#include "audioplace/angles.hpp"
#include "audioplace/calibration.hpp"
#include "audioplace/confusion_model.hpp"
#include "audioplace/errors.hpp"
#include "audioplace/layout.hpp"
#include "audioplace/optimizer.hpp"
#include "audioplace/random.hpp"
#include "audioplace/simulator.hpp"
