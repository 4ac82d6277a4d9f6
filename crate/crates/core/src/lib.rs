pub mod arch;
pub mod bench;
pub mod circuit;
pub mod examples;
pub mod exec;
pub mod gf2;
pub mod phasepoly;
pub mod pipeline;
pub mod placement;
pub mod rng;
pub mod router;
