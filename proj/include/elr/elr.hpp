#pragma once

#include "elr/divergence.hpp"
#include "elr/divided_diff.hpp"
#include "elr/elr_bounds.hpp"
#include "elr/function_model.hpp"
#include "elr/functional.hpp"
#include "elr/generators.hpp"
#include "elr/oracle.hpp"
#include "elr/serialize.hpp"
#include "elr/zipf.hpp"
