//! Special functions and truncated power series.

mod erfc;
mod laguerre;
mod series;

pub use erfc::{erfc_real, erfcx};
pub use laguerre::{laguerre_assoc1, laguerre_assoc1_roots};
pub use series::{series_inv, series_mul, series_pow, TruncatedSeries};
