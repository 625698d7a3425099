#pragma once

#include "sscd/baselines.hpp"
#include "sscd/benchgen.hpp"
#include "sscd/error.hpp"
#include "sscd/evalx.hpp"
#include "sscd/histfeat.hpp"
#include "sscd/io.hpp"
#include "sscd/laprls.hpp"
#include "sscd/pairmetric.hpp"
#include "sscd/pairspace.hpp"
#include "sscd/pipeline.hpp"
#include "sscd/serialize.hpp"
