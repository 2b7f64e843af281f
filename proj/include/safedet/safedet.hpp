#pragma once

#include "safedet/core.hpp"
#include "safedet/dual.hpp"
#include "safedet/geometry.hpp"
#include "safedet/usc.hpp"
#include "safedet/eciou.hpp"
#include "safedet/eval.hpp"
#include "safedet/impact.hpp"
#include "safedet/io.hpp"
#include "safedet/report.hpp"
