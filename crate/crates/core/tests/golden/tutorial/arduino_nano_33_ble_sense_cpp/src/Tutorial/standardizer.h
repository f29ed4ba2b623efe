// Z-score parameters fitted on the training rows.
#pragma once

#include <stdint.h>

// No standardizer was supplied; features pass through unchanged.
static inline float standardize(uint32_t, float v) { return v; }
