#pragma once

#include <stdexcept>
#include <string>

// Error conventions: domain_error for bad caller input, logic_error for broken
// internal invariants. Both carry a short human-readable message.

#ifndef DOMAIN_CHECK
#define DOMAIN_CHECK(cond, msg) \
  do { if (!(cond)) throw std::domain_error(msg); } while (0)
#endif

#ifndef LOGIC_CHECK
#define LOGIC_CHECK(cond, msg) \
  do { if (!(cond)) throw std::logic_error(msg); } while (0)
#endif
