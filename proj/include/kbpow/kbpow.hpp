#pragma once

#include "kbpow/algebraics.hpp"
#include "kbpow/bounds.hpp"
#include "kbpow/cache.hpp"
#include "kbpow/cert_real.hpp"
#include "kbpow/contfrac.hpp"
#include "kbpow/errors.hpp"
#include "kbpow/kbonacci.hpp"
#include "kbpow/parallel.hpp"
#include "kbpow/reduction.hpp"
#include "kbpow/search.hpp"
