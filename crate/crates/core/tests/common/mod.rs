#![allow(dead_code)]

pub mod boundary;
pub mod dd;
pub mod oracle;
