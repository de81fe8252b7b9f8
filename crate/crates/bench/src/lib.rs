//! Shared inputs for the criterion benchmarks.

use vancycle_core::realpoly::{parse_poly, RealPoly};

/// The degree 6 and 4 factors of the worked example.
pub fn worked_example() -> (RealPoly, RealPoly) {
    (
        parse_poly("(x+3)*(x+2)*(x+1)*(x-1)*(x-2)*(x-4)").expect("valid"),
        parse_poly("(3-y)*(y-1)*(y+1)*(y+2)").expect("valid"),
    )
}

/// A decomposable `g = g2(x^2)` with a symmetric grid.
pub fn symmetric_pair() -> (RealPoly, RealPoly) {
    (
        parse_poly("(x^2 - 1)*(x^2 - 4)*(x^2 - 9)").expect("valid"),
        parse_poly("y^3 - 3y").expect("valid"),
    )
}
