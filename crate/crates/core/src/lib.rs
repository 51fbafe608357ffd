pub mod linalg;
pub mod noise;
pub mod solver;
pub mod theory;
pub mod tv;
