#pragma once

#include "sentlen/correlation.hpp"
#include "sentlen/dfa.hpp"
#include "sentlen/distribution.hpp"
#include "sentlen/error.hpp"
#include "sentlen/harness.hpp"
#include "sentlen/linear_map.hpp"
#include "sentlen/report.hpp"
#include "sentlen/series.hpp"
#include "sentlen/text.hpp"
#include "sentlen/utf8.hpp"
