pub mod detok;
pub mod euler;
pub mod graph;
pub mod identity;
pub mod pipeline;
pub mod pretrain;
pub mod sampler;
pub mod seed;
pub mod synth;
pub mod taskfmt;
pub mod tokenizer;
pub mod vocab;
