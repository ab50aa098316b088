#pragma once

#include <optional>

namespace omx {

enum class EnvelopeShape { rectangular, raised_cosine };

struct Window {
    double start = 0.0;
    double stop = 0.0;

    double length() const { return stop - start; }
    bool contains(double t) const { return t >= start && t < stop; }
    bool overlaps(const Window& other) const
    {
        return start < other.stop && other.start < stop;
    }
};

struct ProbeWindow {
    Window window;
    double g_probe = 0.0;  // weak coupling rate during the probe (rad/s)
};

// Timing of the drive, signal and probe pulses within one repetition.
struct PulseProgram {
    double pulse_duration = 6e-6;
    EnvelopeShape shape = EnvelopeShape::rectangular;
    double rise_time = 50e-9;            // raised-cosine edge only
    Window drive1{0.0, 6e-6};
    Window drive2{0.0, 6e-6};
    Window signal{0.0, 6e-6};
    std::optional<ProbeWindow> probe;
    double signal_detuning = 0.0;        // delta, relative to drive 1 (rad/s)
    double repetition_period = 200e-6;

    // Drives, signal and probe share the pulse duration and start at t = 0.
    static PulseProgram synchronized(double duration, double signal_detuning_rad);

    void validate() const;

    // Envelope values in [0,1] at time t.
    double envelope_drive1(double t) const;
    double envelope_drive2(double t) const;
    double envelope_signal(double t) const;
    double envelope_probe(double t) const;
};

double window_envelope(const Window& w, double t, EnvelopeShape shape, double rise_time);

} // namespace omx
