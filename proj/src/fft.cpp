#include "abv/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace abv::detail {

namespace {

// FFTW's planner is not thread-safe; executing a cached plan on new arrays is.
// Plans are created with FFTW_ESTIMATE | FFTW_UNALIGNED: deterministic (no
// measurement) and valid for any array alignment, so one plan per geometry
// serves every buffer.
struct PlanCache {
    std::mutex mu;
    std::map<std::tuple<int, int, int, int, int>, fftw_plan> plans;

    fftw_plan get(int n, int howmany, int stride, int dist, int sign) {
        std::scoped_lock lock(mu);
        auto key = std::make_tuple(n, howmany, stride, dist, sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;

        // Dummy buffer just for planning; FFTW_ESTIMATE does not touch it.
        std::size_t len = static_cast<std::size_t>(n - 1) * stride +
                          static_cast<std::size_t>(howmany - 1) * dist + 1;
        fftw_complex* buf = fftw_alloc_complex(len);
        fftw_plan p = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, stride, dist, buf,
                                         nullptr, stride, dist, sign,
                                         FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        plans.emplace(key, p);
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace

void fft_many(cplx* data, int n, int howmany, int stride, int dist, int sign) {
    fftw_plan p = cache().get(n, howmany, stride, dist, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, d, d);
}

}  // namespace abv::detail
