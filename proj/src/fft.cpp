#include "phonolab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace phonolab {

namespace {

// One cached plan pair per grid side. Plans are created with FFTW_ESTIMATE
// so planning is deterministic, and transforms run single-threaded; output
// is bit-identical across runs and caller thread counts.
struct PlanSet {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    fftw_complex* buf = nullptr;
    std::int64_t n = 0;

    ~PlanSet() {
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (buf) fftw_free(buf);
    }
};

std::mutex g_mutex;
std::map<int, PlanSet> g_plans;

PlanSet& plans_for(int L) {
    PlanSet& ps = g_plans[L];
    if (!ps.forward) {
        ps.n = static_cast<std::int64_t>(L) * L * L;
        ps.buf = fftw_alloc_complex(ps.n);
        // Sign -1 realizes sum_x exp(-i 2pi k.x); row-major dims (z,y,x)
        // match the x-fastest flat layout.
        ps.forward = fftw_plan_dft_3d(L, L, L, ps.buf, ps.buf, FFTW_FORWARD, FFTW_ESTIMATE);
        ps.backward = fftw_plan_dft_3d(L, L, L, ps.buf, ps.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    return ps;
}

CField run(const Grid3& g, const CField& in, bool forward, bool normalize) {
    if (static_cast<std::int64_t>(in.size()) != g.size())
        throw std::invalid_argument("fft: field size does not match grid");
    std::lock_guard<std::mutex> lock(g_mutex);
    PlanSet& ps = plans_for(g.side());
    for (std::int64_t i = 0; i < ps.n; ++i) {
        ps.buf[i][0] = in[i].real();
        ps.buf[i][1] = in[i].imag();
    }
    fftw_execute(forward ? ps.forward : ps.backward);
    CField out(ps.n);
    const double scale = normalize ? 1.0 / static_cast<double>(ps.n) : 1.0;
    for (std::int64_t i = 0; i < ps.n; ++i)
        out[i] = std::complex<double>(ps.buf[i][0] * scale, ps.buf[i][1] * scale);
    return out;
}

}  // namespace

CField dft(const Grid3& g, const CField& f) { return run(g, f, true, false); }

CField dft(const Grid3& g, const RField& f) {
    CField c(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) c[i] = f[i];
    return run(g, c, true, false);
}

CField idft(const Grid3& g, const CField& fhat) { return run(g, fhat, false, true); }

RField idft_real(const Grid3& g, const CField& fhat) {
    CField c = idft(g, fhat);
    RField out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

}  // namespace phonolab
