#pragma once

#include "nsdp/augmented_graph.hpp"
#include "nsdp/cqnsd.hpp"
#include "nsdp/model.hpp"
#include "nsdp/oracle.hpp"
#include "nsdp/qnsd.hpp"
#include "nsdp/scenario.hpp"
#include "nsdp/simplex.hpp"
#include "nsdp/solution_io.hpp"
