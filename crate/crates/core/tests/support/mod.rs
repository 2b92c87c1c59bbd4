pub mod oracles;
pub mod mrt;
