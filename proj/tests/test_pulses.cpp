#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "qfs/pulses.hpp"

namespace {

const double kPi = 3.14159265358979323846;

qfs::DriveProgram flat_omega_program(double omega, double delta_g_start, double total_time) {
    qfs::DriveProgram program;
    program.omega = qfs::Schedule({{0.0, omega}, {total_time, omega}});
    program.phase = qfs::Schedule({{0.0, 0.0}, {total_time, 0.0}});
    program.delta_global = qfs::Schedule({{0.0, delta_g_start}, {total_time, 0.0}});
    program.delta_local_envelope = qfs::Schedule({{0.0, 0.0}, {total_time, 0.0}});
    program.site_weights = {1.0};
    program.total_time = total_time;
    program.validate();
    return program;
}

TEST(Schedule, KnotValidation) {
    EXPECT_THROW(qfs::Schedule({{0.0, 1.0}}), qfs::ValidationError);
    EXPECT_THROW(qfs::Schedule({{0.5, 0.0}, {1.0, 1.0}}), qfs::ValidationError);
    EXPECT_THROW(qfs::Schedule({{0.0, 0.0}, {0.0, 1.0}}), qfs::ValidationError);
    EXPECT_THROW(qfs::Schedule({{0.0, 0.0},
                                {1.0, std::numeric_limits<double>::infinity()}}),
                 qfs::ValidationError);
}

TEST(DefaultProgram, BoundaryConditionsHoldExactly) {
    const qfs::PhysicalConstants constants;
    const auto program = qfs::build_default_program(constants, {1.0, 0.7, 0.4});
    const double t_total = constants.total_time;
    EXPECT_EQ(program.omega.value_at(0.0), 0.0);
    EXPECT_EQ(program.omega.value_at(t_total), 0.0);
    for (double f : {0.0, 0.2, 0.5})
        EXPECT_EQ(program.delta_local_envelope.value_at(f * t_total), 0.0);
    for (double f : {0.5, 0.75, 1.0})
        EXPECT_EQ(program.delta_global.value_at(f * t_total), 0.0);
    EXPECT_EQ(program.delta_global.value_at(0.0), constants.delta_g_initial);
}

TEST(DefaultProgram, UniformWeightsShareTheEnvelope) {
    const qfs::PhysicalConstants constants;
    const auto program = qfs::build_default_program(constants, {1.0, 1.0, 1.0});
    const auto final_sample = qfs::sample_at(program, constants.total_time);
    EXPECT_EQ(final_sample.omega, 0.0);
    EXPECT_EQ(final_sample.delta_g, 0.0);
    for (double p : program.site_weights)
        EXPECT_DOUBLE_EQ(final_sample.delta_l * p, constants.delta_l_max);
}

TEST(DefaultProgram, WeightValidation) {
    const qfs::PhysicalConstants constants;
    EXPECT_THROW(qfs::build_default_program(constants, {}), qfs::ValidationError);
    EXPECT_THROW(qfs::build_default_program(constants, {0.0, 1.0}), qfs::ValidationError);
    EXPECT_THROW(qfs::build_default_program(constants, {1.2}), qfs::ValidationError);
    EXPECT_THROW(qfs::build_default_program(constants, {0.5, 0.5}), qfs::ValidationError);
}

TEST(DefaultProgram, BadFractionOrderingRejected) {
    qfs::ScheduleFractions fractions;
    fractions.omega_rise_end = 0.9;  // rise must end before the fall starts
    EXPECT_THROW(qfs::build_default_program(qfs::PhysicalConstants{}, {1.0}, 40, fractions),
                 qfs::ValidationError);
}

TEST(SampleAt, BoundariesMidpointsAndRangeCheck) {
    const qfs::PhysicalConstants constants;
    const auto program = qfs::build_default_program(constants, {1.0});
    const double t_total = constants.total_time;

    const auto start = qfs::sample_at(program, 0.0);
    EXPECT_EQ(start.omega, 0.0);
    EXPECT_EQ(start.phase, 0.0);
    EXPECT_EQ(start.delta_g, constants.delta_g_initial);
    EXPECT_EQ(start.delta_l, 0.0);

    const auto end = qfs::sample_at(program, t_total);
    EXPECT_EQ(end.omega, 0.0);
    EXPECT_EQ(end.delta_g, 0.0);
    EXPECT_DOUBLE_EQ(end.delta_l, constants.delta_l_max);

    // halfway through the delta_g ramp [0.1 T, 0.5 T]
    const auto mid = qfs::sample_at(program, 0.3 * t_total);
    EXPECT_NEAR(mid.delta_g, 0.5 * constants.delta_g_initial, 1e-9 * std::abs(constants.delta_g_initial));

    EXPECT_THROW(qfs::sample_at(program, -1e-9), qfs::ValidationError);
    EXPECT_THROW(qfs::sample_at(program, t_total * (1.0 + 1e-9)), qfs::ValidationError);
}

TEST(SampleAt, ContinuousAtEveryKnot) {
    const qfs::PhysicalConstants constants;
    const auto program = qfs::build_default_program(constants, {1.0});
    const double delta = 1e-12 * constants.total_time;
    for (const qfs::Schedule* schedule :
         {&program.omega, &program.delta_global, &program.delta_local_envelope}) {
        for (const qfs::Knot& knot : schedule->knots()) {
            const double lo = std::max(0.0, knot.t - delta);
            const double hi = std::min(constants.total_time, knot.t + delta);
            EXPECT_NEAR(schedule->value_at(lo), schedule->value_at(hi), 1e-3);
        }
    }
}

TEST(Discretization, SamplesLieExactlyOnTheSchedules) {
    const qfs::PhysicalConstants constants;
    const auto program = qfs::build_default_program(constants, {1.0}, 40);
    const auto samples = qfs::discretize_program(program);
    ASSERT_EQ(samples.size(), 40u);
    EXPECT_EQ(samples.front().t, 0.0);
    EXPECT_DOUBLE_EQ(samples.back().t, constants.total_time);
    for (const auto& s : samples) {
        EXPECT_EQ(s.omega, program.omega.value_at(s.t));
        EXPECT_EQ(s.delta_g, program.delta_global.value_at(s.t));
        EXPECT_EQ(s.delta_l, program.delta_local_envelope.value_at(s.t));
    }
}

TEST(Slew, DefaultProgramRatesAndBound) {
    const qfs::PhysicalConstants constants;
    const auto program = qfs::build_default_program(constants, {1.0, 0.6});
    const auto report = qfs::validate_slew(program);
    EXPECT_TRUE(report.passed);
    EXPECT_TRUE(report.violations.empty());
    EXPECT_NEAR(report.max_abs_finite_s, 0.4719, 1e-3);

    // the delta_g ramp [0.1 T, 0.5 T] sweeps |delta_g(0)| over 0.4 T
    bool found_ramp = false;
    for (const auto& segment : report.segments) {
        if (segment.channel == "delta_global" && std::abs(segment.sweep_rate) > 0.0) {
            EXPECT_NEAR(std::abs(segment.sweep_rate), 1.875e13, 1e6);
            found_ramp = true;
        }
        if (segment.sweep_rate == 0.0) EXPECT_EQ(segment.s, 0.0);
    }
    EXPECT_TRUE(found_ramp);
}

TEST(Slew, FormulaAgainstHandComputedRate) {
    // sweep of 1.5e13 rad/s^2 against a flat Rabi plateau of 1.58e7 rad/s
    const auto program = flat_omega_program(1.58e7, -1.5e7, 1e-6);
    const auto segments = qfs::slew_profile(program);
    bool found = false;
    for (const auto& segment : segments) {
        if (segment.channel != "delta_global") continue;
        EXPECT_NEAR(segment.s, 1.5e13 * 2.0 * kPi / (1.58e7 * 1.58e7), 1e-12);
        EXPECT_NEAR(segment.s, 0.3775, 5e-4);
        found = true;
    }
    EXPECT_TRUE(found);
}

TEST(Slew, ScaleCovariantInTheDetunings) {
    const qfs::PhysicalConstants constants;
    qfs::PhysicalConstants doubled = constants;
    doubled.delta_g_initial *= 2.0;
    doubled.delta_l_max *= 2.0;
    const auto base = qfs::slew_profile(qfs::build_default_program(constants, {1.0}));
    const auto scaled = qfs::slew_profile(qfs::build_default_program(doubled, {1.0}));
    ASSERT_EQ(base.size(), scaled.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (!std::isfinite(base[i].s)) continue;
        EXPECT_DOUBLE_EQ(scaled[i].s, 2.0 * base[i].s);
    }
}

TEST(Slew, ZeroRabiWithNonzeroSweepReportsInfinityWithoutFailing) {
    qfs::DriveProgram program = flat_omega_program(1.58e7, -1.5e7, 1e-6);
    program.omega = qfs::Schedule({{0.0, 0.0}, {1e-6, 0.0}});
    const auto report = qfs::validate_slew(program);
    bool saw_infinite = false;
    for (const auto& segment : report.segments)
        if (std::isinf(segment.s)) saw_infinite = true;
    EXPECT_TRUE(saw_infinite);
    EXPECT_TRUE(report.passed);  // only finite segments count against the bound
}

TEST(Slew, AllZeroDetuningsPass) {
    qfs::DriveProgram program = flat_omega_program(1.58e7, 0.0, 1e-6);
    program.delta_global = qfs::Schedule({{0.0, 0.0}, {1e-6, 0.0}});
    const auto report = qfs::validate_slew(program);
    EXPECT_TRUE(report.passed);
    EXPECT_EQ(report.max_abs_finite_s, 0.0);
}

TEST(Slew, FasterSweepViolatesTheBoundWithListedSegment) {
    qfs::PhysicalConstants constants;
    constants.delta_g_initial *= 2.0;
    constants.total_time *= 0.5;
    const auto report = qfs::validate_slew(qfs::build_default_program(constants, {1.0}));
    EXPECT_FALSE(report.passed);
    ASSERT_FALSE(report.violations.empty());
    EXPECT_EQ(report.violations.front().channel, "delta_global");
    EXPECT_NEAR(std::abs(report.violations.front().s), 1.888, 5e-3);
}

TEST(Slew, LocalChannelScalesWithTheLargestSiteWeight) {
    const qfs::PhysicalConstants constants;
    const auto program = qfs::build_default_program(constants, {1.0, 0.3});
    double local_rate = 0.0;
    for (const auto& segment : qfs::slew_profile(program))
        if (segment.channel == "delta_local")
            local_rate = std::max(local_rate, std::abs(segment.sweep_rate));
    // envelope sweeps delta_l_max over 0.4 T, scaled by max p = 1
    EXPECT_NEAR(local_rate, constants.delta_l_max / (0.4 * constants.total_time), 1e6);
}

}  // namespace
