#pragma once

#include "rlt/audit.hpp"
#include "rlt/core.hpp"
#include "rlt/corpus.hpp"
#include "rlt/elections.hpp"
#include "rlt/json_io.hpp"
#include "rlt/policies.hpp"
#include "rlt/runner.hpp"
#include "rlt/translations.hpp"
#include "rlt/valuation.hpp"
