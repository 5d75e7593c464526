#ifndef CHUBANOV_CHUBANOV_HPP
#define CHUBANOV_CHUBANOV_HPP

#include "chubanov/errors.hpp"
#include "chubanov/algebra.hpp"
#include "chubanov/projection.hpp"
#include "chubanov/config.hpp"
#include "chubanov/basic_procedure.hpp"
#include "chubanov/rescale.hpp"
#include "chubanov/solver.hpp"
#include "chubanov/io.hpp"
#include "chubanov/sdp.hpp"

#endif  // CHUBANOV_CHUBANOV_HPP
