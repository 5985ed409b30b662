#pragma once

// Umbrella header.

#include "qpencil/coxeter.hpp"
#include "qpencil/errors.hpp"
#include "qpencil/fixtures.hpp"
#include "qpencil/io.hpp"
#include "qpencil/matrix.hpp"
#include "qpencil/multipoly.hpp"
#include "qpencil/pencil.hpp"
#include "qpencil/projpair.hpp"
