#pragma once

// Umbrella header: the whole library.

#include "fedwarn/bytes.hpp"
#include "fedwarn/chain_io.hpp"
#include "fedwarn/crypto.hpp"
#include "fedwarn/csv.hpp"
#include "fedwarn/epidemic.hpp"
#include "fedwarn/errors.hpp"
#include "fedwarn/events.hpp"
#include "fedwarn/federation.hpp"
#include "fedwarn/ledger.hpp"
#include "fedwarn/netmodel.hpp"
#include "fedwarn/rng.hpp"
#include "fedwarn/scenario.hpp"
#include "fedwarn/serialize.hpp"
#include "fedwarn/simharness.hpp"
#include "fedwarn/telemetry.hpp"
