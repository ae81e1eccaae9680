#pragma once

#include "qimem/density.hpp"
#include "qimem/entanglement.hpp"
#include "qimem/errors.hpp"
#include "qimem/grover.hpp"
#include "qimem/image.hpp"
#include "qimem/io.hpp"
#include "qimem/measurement.hpp"
#include "qimem/retrieval.hpp"
#include "qimem/rng.hpp"
#include "qimem/state.hpp"
