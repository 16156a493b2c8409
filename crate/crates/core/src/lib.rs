//! Models for a hybrid twisted-string + winch actuator.
//!
//! * [`actuator`]: displacement model and the implicit length solve
//! * [`gear`]: motor to effective angle/velocity maps
//! * [`control`]: velocity allocation and channel command laws
//! * [`force`]: stalled-output force model
//! * [`sim`]: scenario runner, transmission ratios and sweeps
//!
//! Everything is SI (m, rad, N, s) and every function is pure.

pub mod actuator;
pub mod control;
pub mod error;
pub mod force;
pub mod gear;
pub mod params;
pub mod sim;

pub use actuator::{
    contracted_length, loaded_length, solve_total_contraction, solve_total_contraction_with,
    solve_twisted_length, twist_contraction, twist_limit, ActuatorState, SolveMethod,
    SolverOptions, TwistSolution,
};
pub use control::{
    allocate, r_var_rate, twist_velocity_command, velocity_command, winch_velocity_command,
    AllocationPolicy, ControlSettings, VelocityAllocation, VelocityCommand,
};
pub use error::{ModelError, Result};
pub use force::{
    dominance_crossover, exit_angle, force_breakdown, helix_angle, total_force, twist_force,
    winch_force, ForceBreakdown, WinchTorque,
};
pub use gear::{
    effective_angles, effective_rates, motor_angles, motor_velocities, EffectiveAngles,
    EffectiveRates, GearTrain, MotorAngles, MotorRates,
};
pub use params::{LoadCondition, Stiffness, StringParams, WinchGeometry};
pub use sim::{
    run, transmission_ratio, velocity_sweep, Phase, PhaseTarget, Scenario, SimulationAborted,
    SweepChannel, SweepPoint, TraceSample, TransmissionRatio,
};
