#pragma once

#include "spinortheta/equivalence.hpp"
#include "spinortheta/form.hpp"
#include "spinortheta/genus.hpp"
#include "spinortheta/local.hpp"
#include "spinortheta/parallel.hpp"
#include "spinortheta/rational.hpp"
#include "spinortheta/reduce.hpp"
#include "spinortheta/spinor.hpp"
#include "spinortheta/theta.hpp"
