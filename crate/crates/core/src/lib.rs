pub mod exactlin;
pub mod algebra;
pub mod modcx;
pub mod resolve;
pub mod obstruction;
pub mod nullpair;
pub mod oracle;
pub mod instance;
