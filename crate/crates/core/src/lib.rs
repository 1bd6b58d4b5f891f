pub mod ambient;
pub mod holonomy;
pub mod jetcalc;
pub mod linalg;
pub mod metrics;
pub mod tensorgeo;
pub mod tractor;
