//! Reference implementations shared by the integration tests. Each target
//! uses a different subset.
#![allow(dead_code)]

pub mod brute;
pub mod linalg;
pub mod octonion;
