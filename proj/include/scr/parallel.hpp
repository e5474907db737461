#pragma once

namespace scr {

/// Sets the OpenMP thread count for subsequent parallel regions; values < 1
/// leave the runtime default. No-op without OpenMP.
void set_num_threads(int threads);

int max_threads();

}  // namespace scr
