#include "hp/fft.hpp"

#include "hp/error.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace hp {

namespace {

struct PlanCache {
    std::mutex mutex;
    std::map<std::tuple<std::vector<int>, int, int>, fftw_plan> plans;

    ~PlanCache() {
        for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
    }

    fftw_plan get(const std::vector<int>& shape, int howmany, int sign) {
        std::lock_guard lock(mutex);
        const auto key = std::make_tuple(shape, howmany, sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;
        int total = 1;
        for (int s : shape) total *= s;
        auto* scratch = fftw_alloc_complex(static_cast<std::size_t>(total) * howmany);
        fftw_plan plan = fftw_plan_many_dft(static_cast<int>(shape.size()), shape.data(), howmany,
                                            scratch, nullptr, 1, total, scratch, nullptr, 1, total,
                                            sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        if (!plan) fail(ErrorCode::Numerical, "FFTW planning failed");
        plans.emplace(key, plan);
        return plan;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void execute(Complex* data, const std::vector<int>& shape, int howmany, int sign) {
    if (shape.empty()) return;
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(cache().get(shape, howmany, sign), p, p);
}

} // namespace

void fft_forward(Complex* data, const std::vector<int>& shape, int howmany) {
    execute(data, shape, howmany, FFTW_FORWARD);
}

void fft_backward(Complex* data, const std::vector<int>& shape, int howmany) {
    execute(data, shape, howmany, FFTW_BACKWARD);
}

void to_space(CMatrix& values, const TangentialGrid& grid) {
    require(static_cast<std::size_t>(values.rows()) == grid.size(), "to_space: row count does not match grid");
    if (grid.axes == 0 || values.cols() == 0) return;
    fft_backward(values.data(), grid.shape(), static_cast<int>(values.cols()));
}

void to_frequency(CMatrix& values, const TangentialGrid& grid) {
    require(static_cast<std::size_t>(values.rows()) == grid.size(), "to_frequency: row count does not match grid");
    if (grid.axes == 0 || values.cols() == 0) return;
    fft_forward(values.data(), grid.shape(), static_cast<int>(values.cols()));
    values /= static_cast<double>(grid.size());
}

GridFunction to_space(const GridFunction& f, const TangentialGrid& grid) {
    GridFunction out = f;
    if (f.layout == Layout::Frequency) to_space(out.values, grid);
    out.layout = Layout::Space;
    return out;
}

GridFunction to_frequency(const GridFunction& f, const TangentialGrid& grid) {
    GridFunction out = f;
    if (f.layout == Layout::Space) to_frequency(out.values, grid);
    out.layout = Layout::Frequency;
    return out;
}

} // namespace hp
