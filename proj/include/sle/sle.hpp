#pragma once

#include "sle/driver.hpp"
#include "sle/driving_path.hpp"
#include "sle/exact_laws.hpp"
#include "sle/experiments.hpp"
#include "sle/geometry.hpp"
#include "sle/loewner.hpp"
#include "sle/parallel.hpp"
#include "sle/params.hpp"
#include "sle/rational.hpp"
#include "sle/report.hpp"
#include "sle/rng.hpp"
#include "sle/special.hpp"
#include "sle/stats.hpp"
#include "sle/svg.hpp"
