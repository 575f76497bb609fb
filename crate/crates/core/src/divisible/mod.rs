//! Multiple divisible goods, one unit of each.

mod completion;
mod eg;
mod subset;

pub use completion::{allocation_for_prices, prices_for_allocation};
pub use eg::{solve_eg, EgProgram, DEFAULT_EG_TOLERANCE, EG_ITERATION_CAP};
pub use subset::{max_welfare_caei, subset_caei_lp};

pub(crate) use subset::max_welfare_with_clearing;
