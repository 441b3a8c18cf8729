#include "pisco/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace pisco::kernels {

namespace {

struct Selection {
    const Ops* ops;
    std::string_view name;
};

Selection select() {
    const char* env = std::getenv("PISCO_KERNELS");
    const std::string_view want = env ? std::string_view(env) : std::string_view("auto");
    if (want == "scalar") return {&scalar::ops, "scalar"};
    if (want == "avx2" && avx2::available()) return {&avx2::ops, "avx2"};
    if (want == "auto" && avx2::available()) return {&avx2::ops, "avx2"};
    return {&scalar::ops, "scalar"};
}

const Selection g_selection = select();

}  // namespace

const Ops& active() { return *g_selection.ops; }

std::string_view backend_name() { return g_selection.name; }

}  // namespace pisco::kernels
