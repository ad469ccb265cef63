#include <quadtwist/parallel.hpp>

#include <cstdlib>
#include <string>

namespace quadtwist
{

int resolve_threads(int requested)
{
    if (requested > 0) {
        return requested;
    }
    if (const char *env = std::getenv(thread_env_var)) {
        try {
            int v = std::stoi(env);
            if (v > 0) {
                return v;
            }
        } catch (...) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace quadtwist
