#pragma once

#include "msf/errors.hpp"
#include "msf/rational.hpp"
#include "msf/index_set.hpp"
#include "msf/topology.hpp"
#include "msf/sheaf.hpp"
#include "msf/logic.hpp"
#include "msf/forcing.hpp"
#include "msf/generic.hpp"
#include "msf/document.hpp"
#include "msf/suites.hpp"
