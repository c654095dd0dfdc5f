#pragma once

#include "ksv/bounds.hpp"
#include "ksv/coloring.hpp"
#include "ksv/density.hpp"
#include "ksv/errors.hpp"
#include "ksv/io.hpp"
#include "ksv/linalg.hpp"
#include "ksv/mcsim.hpp"
#include "ksv/operator.hpp"
#include "ksv/orthograph.hpp"
#include "ksv/rational.hpp"
#include "ksv/ray.hpp"
#include "ksv/rayset.hpp"
#include "ksv/reconstruct.hpp"
#include "ksv/rng.hpp"
#include "ksv/scalar.hpp"
#include "ksv/verify.hpp"
