pub mod binary;
pub mod chain;
pub mod diagrams;
pub mod error;
pub mod field;
pub mod heller;
pub mod layout;
pub mod matrix;
pub mod random;
pub mod reduce;
pub mod torsion;
