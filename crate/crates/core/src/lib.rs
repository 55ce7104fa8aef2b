pub mod qalgebra;
pub mod chorddiag;
pub mod m1;
pub mod modlinalg;
pub mod pipeline;
pub mod relations;
pub mod rewriter;
