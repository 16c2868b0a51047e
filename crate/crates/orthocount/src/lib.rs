//! Configuration, file formats, threading and the command implementations
//! behind the `orthocount` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod selftest;
pub mod threads;
