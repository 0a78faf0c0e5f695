#ifndef PROPDELAY_PROPDELAY_HPP
#define PROPDELAY_PROPDELAY_HPP

#include "propdelay/closedform.hpp"
#include "propdelay/errors.hpp"
#include "propdelay/reference.hpp"
#include "propdelay/sam.hpp"
#include "propdelay/scalar.hpp"
#include "propdelay/serialize.hpp"
#include "propdelay/series.hpp"
#include "propdelay/specfun.hpp"
#include "propdelay/stability.hpp"

#endif  // PROPDELAY_PROPDELAY_HPP
