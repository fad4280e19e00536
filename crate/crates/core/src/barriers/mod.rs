//! Explicit barrier functions: the small-ball maximum-principle barrier, the
//! radial pair used for the boundary Harnack comparison, and the
//! double-exponential example showing the power-type bound is sharp.

mod boundary;
mod loglog;
mod profile;
mod regularized;
mod sharpness;

pub use boundary::*;
pub use loglog::*;
pub use profile::*;
pub use regularized::*;
pub use sharpness::*;
