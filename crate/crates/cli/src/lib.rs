//! Command-line front end: runs either engine or both, compares them, and
//! reproduces the reference tables.

use std::str::FromStr;

use clap::ValueEnum;

pub mod app;
pub mod config;
pub mod curves;
pub mod error;
pub mod report;
pub mod tables;

pub use app::main_with;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engines {
    Aim,
    Hdm,
    Both,
}

impl Engines {
    pub fn aim(self) -> bool {
        self != Engines::Hdm
    }

    pub fn hdm(self) -> bool {
        self != Engines::Aim
    }
}

impl FromStr for Engines {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Engines as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}
