//! Shared fixtures for the benchmarks.

use oritube::{generate_tube, make_quad_section, TubeGeometry, TubeSpec};

/// Square-section tube, 15 mm edges, 45° zigzag, `n_units` units.
pub fn square_tube(n_units: usize) -> TubeGeometry {
    let cs = make_quad_section(15.0, 15.0, 0.0, 90.0).expect("valid section");
    generate_tube(&TubeSpec::new(cs, 45.0, 15.0, n_units)).expect("valid tube")
}
