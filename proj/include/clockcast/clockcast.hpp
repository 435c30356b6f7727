#pragma once

#include "clockcast/arima.hpp"
#include "clockcast/checkpoint.hpp"
#include "clockcast/compare.hpp"
#include "clockcast/errors.hpp"
#include "clockcast/eval.hpp"
#include "clockcast/ingest.hpp"
#include "clockcast/linalg.hpp"
#include "clockcast/neural.hpp"
#include "clockcast/rng.hpp"
#include "clockcast/series.hpp"
#include "clockcast/text.hpp"
#include "clockcast/training.hpp"
#include "clockcast/version.hpp"
