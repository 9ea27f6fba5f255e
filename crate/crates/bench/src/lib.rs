//! Shared fixtures for the criterion benchmarks.

use interproj::problems::{gen_norm, gen_sdp, GeneratedInstance};

pub fn norm_instance() -> GeneratedInstance {
    gen_norm(100, 7).expect("norm generation")
}

pub fn sdp_instance() -> GeneratedInstance {
    gen_sdp(10, 10, 7).expect("sdp generation")
}
