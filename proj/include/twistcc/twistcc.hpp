#pragma once

#include "twistcc/certify.hpp"
#include "twistcc/config.hpp"
#include "twistcc/error.hpp"
#include "twistcc/hessian.hpp"
#include "twistcc/interval.hpp"
#include "twistcc/io.hpp"
#include "twistcc/kite.hpp"
#include "twistcc/pair_table.hpp"
#include "twistcc/solver.hpp"
#include "twistcc/twist.hpp"
