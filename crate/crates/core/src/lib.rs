pub mod annulus;
pub mod heegaard;
pub mod hochschild;
pub mod laurent;
pub mod polyring;
pub mod surface;
