#ifndef TBKIT_TBKIT_HPP
#define TBKIT_TBKIT_HPP

#include "tbkit/changeset.hpp"
#include "tbkit/conllu.hpp"
#include "tbkit/inventory.hpp"
#include "tbkit/lexicons.hpp"
#include "tbkit/metrics.hpp"
#include "tbkit/morphology.hpp"
#include "tbkit/rules.hpp"
#include "tbkit/text.hpp"
#include "tbkit/validation.hpp"

#endif  // TBKIT_TBKIT_HPP
