#pragma once

#include <cstdint>
#include <vector>

namespace vocr {

// Otsu's global threshold: maximizes between-class variance over the
// 256-bin histogram; ties resolve to the lowest threshold. The split is
// {v <= t} vs {v > t}. Callers must special-case constant inputs (every
// threshold scores zero there; 0 is returned).
int otsu_threshold(const std::vector<std::uint8_t>& values);

}  // namespace vocr
