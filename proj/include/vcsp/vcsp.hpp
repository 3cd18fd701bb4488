#pragma once

#include "vcsp/rational.hpp"
#include "vcsp/caps.hpp"
#include "vcsp/model.hpp"
#include "vcsp/io.hpp"
#include "vcsp/exactlp.hpp"
#include "vcsp/oracle.hpp"
#include "vcsp/feasibility.hpp"
#include "vcsp/blp.hpp"
#include "vcsp/algebra.hpp"
#include "vcsp/lifting.hpp"
#include "vcsp/opgraph.hpp"
