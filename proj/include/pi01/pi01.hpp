#pragma once

#include "pi01/strings.hpp"
#include "pi01/tree.hpp"
#include "pi01/machine.hpp"
#include "pi01/programs.hpp"
#include "pi01/join.hpp"
#include "pi01/special_family.hpp"
#include "pi01/cone_avoidance.hpp"
#include "pi01/chain.hpp"
