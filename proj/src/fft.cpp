#include "uavmd/fft.hpp"
#include "uavmd/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <utility>

namespace uavmd::fft {
namespace {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

class PlanCache {
public:
    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mu_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second.get();
        // Planning needs scratch storage; execution later goes through the
        // new-array interface, hence FFTW_UNALIGNED.
        std::vector<cplx> scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw NumericalError("fftw: could not create plan of length " + std::to_string(n));
        return plans_.emplace(key, Plan(p)).first->second.get();
    }

    // Batched plan: `count` transforms of length n with element stride
    // `stride` and distance `dist` between transforms.
    fftw_plan get_many(std::size_t n, std::size_t count, std::size_t stride, std::size_t dist, int sign) {
        std::lock_guard lock(mu_);
        auto key = std::make_tuple(n, count, stride, dist, sign);
        auto it = many_.find(key);
        if (it != many_.end()) return it->second.get();
        std::vector<cplx> scratch(n * count);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        const int len = static_cast<int>(n);
        fftw_plan p = fftw_plan_many_dft(1, &len, static_cast<int>(count), buf, nullptr, static_cast<int>(stride),
                                         static_cast<int>(dist), buf, nullptr, static_cast<int>(stride),
                                         static_cast<int>(dist), sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw NumericalError("fftw: could not create batched plan");
        return many_.emplace(key, Plan(p)).first->second.get();
    }

private:
    std::mutex mu_;
    std::map<std::pair<std::size_t, int>, Plan> plans_;
    std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, int>, Plan> many_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void run(std::span<const cplx> in, std::span<cplx> out, int sign) {
    if (in.size() != out.size()) throw ParameterError("fft: length mismatch");
    if (in.empty()) return;
    if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
    auto* buf = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(cache().get(out.size(), sign), buf, buf);
}

} // namespace

void forward(std::span<const cplx> in, std::span<cplx> out) { run(in, out, FFTW_FORWARD); }

void backward(std::span<const cplx> in, std::span<cplx> out) { run(in, out, FFTW_BACKWARD); }

void backward_columns(ComplexMatrix& m) {
    if (m.size() == 0) return;
    auto* buf = reinterpret_cast<fftw_complex*>(m.flat().data());
    fftw_execute_dft(cache().get_many(m.rows(), m.cols(), m.cols(), 1, FFTW_BACKWARD), buf, buf);
}

void forward_rows(ComplexMatrix& m) {
    if (m.size() == 0) return;
    auto* buf = reinterpret_cast<fftw_complex*>(m.flat().data());
    fftw_execute_dft(cache().get_many(m.cols(), m.rows(), 1, m.cols(), FFTW_FORWARD), buf, buf);
}

} // namespace uavmd::fft
