// SPDX-License-Identifier: Apache-2.0
#include "skybridge/link.hpp"

// LinkScheduler and DelayedQueue are header-only; this TU anchors the
// header into the build so it is compiled standalone at least once.

namespace skybridge {}
