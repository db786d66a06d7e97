#ifndef MV_MV_HPP
#define MV_MV_HPP

#include "mv/error.hpp"
#include "mv/geometry.hpp"
#include "mv/ltl.hpp"
#include "mv/navgraph.hpp"
#include "mv/partition.hpp"
#include "mv/rules.hpp"
#include "mv/scenario.hpp"
#include "mv/smv.hpp"
#include "mv/svg.hpp"
#include "mv/verify.hpp"

#endif  // MV_MV_HPP
