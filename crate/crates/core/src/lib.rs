pub mod abelian;
pub mod complexes;
pub mod engine;
pub mod intlinalg;
pub mod presheaf;
pub mod random;
pub mod suite;
pub mod text;
pub mod tstructure;
pub mod unstable;
