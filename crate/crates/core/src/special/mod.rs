//! Complex special functions: gamma, Gauss 2F1 with analytic continuation,
//! and the 3F2 series.

pub(crate) mod continuation;
mod gamma;
mod hyp2f1;
mod hyp3f2;

pub use gamma::{gamma, is_nonpositive_integer, ln_gamma, rgamma};
pub use hyp2f1::{gauss_2f1, gauss_2f1_via, select_route, BranchedArgument, CutSide, Route};
pub use hyp3f2::clausen_3f2;
pub(crate) use hyp3f2::series_3f2;
