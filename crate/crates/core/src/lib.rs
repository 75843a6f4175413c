pub mod bases;
pub mod cli;
pub mod domains;
pub mod experiments;
pub mod fit;
pub mod laplace;
pub mod numkit;
pub mod poles;
