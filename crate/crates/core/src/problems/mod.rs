//! Benchmark problem generators.

mod laplace;
mod quadratic;
mod uncon;

pub use laplace::{gen_laplace, LaplaceOperator, LaplaceSpec, LaplaceVariant, DEFAULT_MEMORY_CAP};
pub use quadratic::{gen_nonrand_quad, gen_random_quad, uniform_start, RandomQuad, SpectrumSpec};
pub use uncon::{gen_uncon_suite, TestFunction, UnconFunction, UnconProblem};
