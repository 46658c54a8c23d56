#pragma once

#include "sandk/completion.hpp"
#include "sandk/configuration.hpp"
#include "sandk/error.hpp"
#include "sandk/families.hpp"
#include "sandk/graph.hpp"
#include "sandk/graph_io.hpp"
#include "sandk/integer.hpp"
#include "sandk/ktheory.hpp"
#include "sandk/matrix.hpp"
#include "sandk/monoid.hpp"
#include "sandk/realize.hpp"
#include "sandk/rewrite.hpp"
