pub mod check;
pub mod eval;
pub mod gen;
pub mod gradcheck;
pub mod loss;
pub mod render;
pub mod segment;
pub mod train;
