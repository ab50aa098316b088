#include "omx/pulse.hpp"

#include "omx/errors.hpp"
#include "omx/units.hpp"

#include <algorithm>
#include <cmath>

namespace omx {

PulseProgram PulseProgram::synchronized(double duration, double signal_detuning_rad)
{
    PulseProgram p;
    p.pulse_duration = duration;
    p.drive1 = {0.0, duration};
    p.drive2 = {0.0, duration};
    p.signal = {0.0, duration};
    p.signal_detuning = signal_detuning_rad;
    p.repetition_period = std::max(200e-6, 4.0 * duration);
    return p;
}

void PulseProgram::validate() const
{
    auto check_window = [this](const Window& w, const char* name) {
        if (w.start < 0.0 || w.stop < w.start)
            throw ConfigError(std::string("pulse.") + name + ": malformed window");
        if (w.stop > repetition_period)
            throw ConfigError(std::string("pulse.") + name +
                              ": window exceeds repetition period");
    };
    check_window(drive1, "drive1");
    check_window(drive2, "drive2");
    check_window(signal, "signal");
    if (probe) {
        check_window(probe->window, "probe");
        if (probe->window.overlaps(drive1))
            throw ConfigError("pulse.probe: probe window overlaps the drive-1 window");
        if (probe->g_probe < 0.0)
            throw ConfigError("pulse.probe: probe coupling must be >= 0");
    }
    if (rise_time < 0.0)
        throw ConfigError("pulse.rise_time: must be >= 0");
}

double window_envelope(const Window& w, double t, EnvelopeShape shape, double rise_time)
{
    if (!w.contains(t))
        return 0.0;
    if (shape == EnvelopeShape::rectangular)
        return 1.0;
    const double r = std::min(rise_time, 0.5 * w.length());
    if (r <= 0.0)
        return 1.0;
    const double from_start = t - w.start;
    const double to_stop = w.stop - t;
    if (from_start < r)
        return 0.5 * (1.0 - std::cos(from_start / r * 3.14159265358979323846));
    if (to_stop < r)
        return 0.5 * (1.0 - std::cos(to_stop / r * 3.14159265358979323846));
    return 1.0;
}

double PulseProgram::envelope_drive1(double t) const
{
    return window_envelope(drive1, t, shape, rise_time);
}

double PulseProgram::envelope_drive2(double t) const
{
    return window_envelope(drive2, t, shape, rise_time);
}

double PulseProgram::envelope_signal(double t) const
{
    return window_envelope(signal, t, shape, rise_time);
}

double PulseProgram::envelope_probe(double t) const
{
    if (!probe)
        return 0.0;
    return window_envelope(probe->window, t, shape, rise_time);
}

} // namespace omx
