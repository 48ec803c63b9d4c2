// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! Simulation and analysis of measurement-driven ("athermal") and hybrid
//! quantum clocks.
//!
//! Two- and three-level open quantum systems are evolved under engineered
//! Kraus channels: unobserved weak spin measurements pump the system, an
//! observed fluorescence channel produces the clock ticks, and (for hybrid
//! clocks) thermal reservoirs act in parallel. Tick statistics are obtained
//! along two independent routes that can be cross-checked against each other:
//!
//! * [`trajectory`] — stochastic quantum-trajectory Monte Carlo with
//!   seeded, order-independent parallel ensembles;
//! * [`ldt`] — spectral predictions from the tilted generator, whose
//!   largest real eigenvalue is the scaled cumulant generating function of
//!   the tick count (mean, variance, Mandel Q, timing error).
//!
//! [`numkernel`] holds the dense complex linear algebra (vectorized
//! superoperators, null-space steady states, non-Hermitian eigenvalues),
//! [`clockmodel`] builds every operator from the model parameters,
//! [`stats`] estimates count statistics from simulated ensembles, and
//! [`validate`] bundles the runtime self-check suites used by the CLI.

pub mod clockmodel;
pub mod ldt;
pub mod numkernel;
pub mod stats;
pub mod trajectory;
pub mod validate;

// Re-exports land here as modules fill in.
pub use numkernel::{ComplexMatrix, DensityMatrix, NumericsConfig, Superoperator};

