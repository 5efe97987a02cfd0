//! Simulation and analysis of the Winfree model with order-n trigonometric
//! influence `I_n(θ) = a_n (1 + cos θ)^n` and sensitivity `S(θ) = −sin θ`.
//!
//! ```
//! use winfree::dynamics::{simulate, EnsembleState, ModelConfig, SimOptions};
//! use winfree::analysis::{classify, rotation_numbers, Label, Tolerances};
//!
//! let model = ModelConfig::new(2, 0.0, vec![1.0, 2.0]).unwrap();
//! let start = EnsembleState::at_zero(vec![0.0, 0.5]).unwrap();
//! let trace = simulate(&model, &start, &SimOptions::new(0.01, 20.0)).unwrap();
//! let rho = rotation_numbers(&trace, 0.5).unwrap();
//! let state = classify(&rho, model.frequencies(), Tolerances::default());
//! assert_eq!(state.label, Label::Incoherence);
//! ```

pub mod analysis;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod kernel;
pub mod quadrature;
pub mod sweep;
pub mod verify;

pub use error::{Result, WinfreeError};
pub use kernel::KernelOrder;
