pub mod cli;
pub mod exact;
pub mod groupring;
pub mod hahn;
pub mod instances;
pub mod interval;
pub mod posdef;
pub mod soscert;
