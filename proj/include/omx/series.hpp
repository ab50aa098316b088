#pragma once

#include "omx/model.hpp"
#include "omx/units.hpp"

#include <cstddef>
#include <vector>

namespace omx {

// Uniformly sampled record. dt > 0, samples non-empty for a valid series.
template <class T>
struct Series {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<T> samples;

    std::size_t size() const { return samples.size(); }
    double time_at(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double end_time() const
    {
        return samples.empty() ? t0 : time_at(samples.size() - 1);
    }
};

using ComplexSeries = Series<Complex>;
using RealSeries = Series<double>;
using Trajectory = Series<ModeState>;

} // namespace omx
