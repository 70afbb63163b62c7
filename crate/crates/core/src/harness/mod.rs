pub mod config;
pub mod data;
pub mod experiment;
pub mod oracle;
pub mod output;
