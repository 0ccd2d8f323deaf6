//! Shared fixtures for the criterion benches in `benches/`.

use eos_core::relu_net::{generate_dataset, PreparedData, ReluParams};

/// Dataset at the standard experiment size: d = 200, n = 300, λ = 3.
pub fn relu_fixture(seed: u64) -> (PreparedData, ReluParams) {
    let ds = generate_dataset(200, 300, 3.0, seed).expect("valid dataset shape");
    let p = ReluParams { a_minus: 0.02, a_plus: -0.01, b: -0.2 };
    (PreparedData::new(&ds), p)
}
