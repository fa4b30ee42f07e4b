pub mod identities;
pub mod kernel;
pub mod lp_sweep;
pub mod norms;
