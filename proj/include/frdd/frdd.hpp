#pragma once

#include "frdd/benchmark.hpp"
#include "frdd/caputo.hpp"
#include "frdd/contconv.hpp"
#include "frdd/diffusion.hpp"
#include "frdd/field.hpp"
#include "frdd/filters.hpp"
#include "frdd/io.hpp"
#include "frdd/metrics.hpp"
#include "frdd/pipeline.hpp"
#include "frdd/synth.hpp"
