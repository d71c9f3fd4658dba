//! Small numeric kernel shared by the statistical modules.

mod hessian;
mod ols;
mod optim;
mod spectral;

pub use hessian::numerical_hessian;
pub use ols::{ols_fit, OlsResult};
pub use optim::{minimize, minimize_with_restart, MinimizeOptions, OptimResult};
pub use spectral::periodogram;
