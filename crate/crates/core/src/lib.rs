pub mod ec_char3;
pub mod gf9;
pub mod local_fields;
pub mod padic;
pub mod phigal;
pub mod semilinear;
