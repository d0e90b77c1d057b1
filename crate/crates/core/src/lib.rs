//! Forward simulation and spectral tomography for time-frequency entangled
//! photon pairs.
//!
//! * [`math`]: grids, quadrature and Fourier sums.
//! * [`jsa`]: joint spectral amplitudes and exchange symmetry.
//! * [`interferometers`]: HOM, N00N and combination interferometers, each as
//!   a brute-force double integral and as reduced closed forms.
//! * [`distributions`]: Wigner function, STFTs and related transforms.
//! * [`tomography`]: inversion of quadrature scan pairs back to `f₊`, `f₋`.

pub mod distributions;
pub mod error;
pub mod exec;
pub mod interferometers;
pub mod jsa;
pub mod math;
pub mod tomography;

pub use error::{Error, Result};
pub use num_complex::Complex64;
