#include "hopflab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace hopflab {

unsigned worker_count() {
    if (const char* s = std::getenv("HOPFLAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(s, &end, 10);
        if (end != s && v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace hopflab
