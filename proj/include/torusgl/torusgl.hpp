#pragma once

#include "torusgl/energetics.hpp"
#include "torusgl/errors.hpp"
#include "torusgl/fields.hpp"
#include "torusgl/io.hpp"
#include "torusgl/kazdan_warner.hpp"
#include "torusgl/lattice.hpp"
#include "torusgl/phase.hpp"
#include "torusgl/selfdual.hpp"
#include "torusgl/theta.hpp"
#include "torusgl/zero_locator.hpp"
