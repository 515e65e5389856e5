pub mod analysis;
pub mod basis;
pub mod exact;
pub mod residue;
pub mod selfcheck;
pub mod table;
