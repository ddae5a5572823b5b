pub mod arith;
pub mod frob;
pub mod hecke;
pub mod hzdiv;
pub mod numberfield;
pub mod qform;
pub mod scan;
pub mod spend;
