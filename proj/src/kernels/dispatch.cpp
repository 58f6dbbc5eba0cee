#include <cstdlib>
#include <cstring>

#include "ends/kernels.hpp"

namespace ends::kernels {

const Table& active()
{
    static const Table& chosen = [] () -> const Table& {
        const char* env = std::getenv("ENDS_SCATTER_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return scalar_table();
        return avx2_supported() ? avx2_table() : scalar_table();
    }();
    return chosen;
}

}  // namespace ends::kernels
