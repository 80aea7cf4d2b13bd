#pragma once

#include "mucogarch/conditions.hpp"
#include "mucogarch/ergolab.hpp"
#include "mucogarch/errors.hpp"
#include "mucogarch/generator.hpp"
#include "mucogarch/levy.hpp"
#include "mucogarch/matcore.hpp"
#include "mucogarch/parallel.hpp"
#include "mucogarch/process.hpp"
#include "mucogarch/rng.hpp"
