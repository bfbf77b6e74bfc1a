#pragma once

#include "spikecount/calibration.hpp"
#include "spikecount/csv_matrix.hpp"
#include "spikecount/error.hpp"
#include "spikecount/estimators.hpp"
#include "spikecount/presets.hpp"
#include "spikecount/report.hpp"
#include "spikecount/rmt.hpp"
#include "spikecount/rng.hpp"
#include "spikecount/simulation.hpp"
#include "spikecount/spectra.hpp"
