#pragma once

#include "ripsel/barrier.hpp"
#include "ripsel/certify.hpp"
#include "ripsel/error.hpp"
#include "ripsel/factorize.hpp"
#include "ripsel/generate.hpp"
#include "ripsel/john.hpp"
#include "ripsel/linalg.hpp"
