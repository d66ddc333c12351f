pub mod bordism;
pub mod clifford;
pub mod exact;
pub mod modforms;
pub mod moduli;
pub mod qseries;
pub mod realization;
pub mod report;
pub mod suite;
pub mod susy;
