pub mod expr;
pub mod geometry;
pub mod wstar;
pub mod cli;
pub mod relativity;
