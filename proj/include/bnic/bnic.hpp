// Umbrella header.
#pragma once

#include "bnic/bench.hpp"
#include "bnic/cluster_tree.hpp"
#include "bnic/compile.hpp"
#include "bnic/graph.hpp"
#include "bnic/incremental.hpp"
#include "bnic/io.hpp"
#include "bnic/model.hpp"
#include "bnic/mpd.hpp"
#include "bnic/random.hpp"
#include "bnic/verify.hpp"
