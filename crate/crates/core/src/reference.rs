//! The bundled four-variable Boolean network with horseshoe dynamics, and
//! the data that goes with it.

use crate::graph::CycleSpec;
use crate::network::{parse_network, GlassNetwork, OrthantCode};

/// Focal-point table of the four-variable example network.
pub const HORSESHOE_NETWORK_TEXT: &str = "\
glassnet 1
n 4
# orthant  focal point
0000 -1  1  1  1
0001 -1  1 -1  1
0010  1 -1  1 -1
0011  1 -1 -1 -1
0100 -1  1  1  1
0101 -1  1  1  1
0110  1 -1  1 -1
0111  1 -1  1 -1
1000 -1  1 -1 -1
1001 -1  1 -1 -1
1010  1  1 -1 -1
1011  1 -1 -1 -1
1100 -1  1 -1  1
1101 -1  1  1  1
1110  1  1 -1  1
1111  1 -1  1  1
";

/// Cycle whose branch at `1011` goes through `1001` (symbol 0).
pub const CYCLE_0: &str = "0101,0111,1111,1011,1001,1000,1100,1101";
/// Cycle whose branch at `1011` goes through `1010` (symbol 1).
pub const CYCLE_1: &str = "0101,0111,1111,1011,1010,1000,1100,1101";

pub fn horseshoe_network() -> GlassNetwork {
    parse_network(HORSESHOE_NETWORK_TEXT).expect("bundled network is valid")
}

pub fn cycle_0() -> CycleSpec {
    CycleSpec::parse(CYCLE_0).expect("bundled cycle is valid")
}

pub fn cycle_1() -> CycleSpec {
    CycleSpec::parse(CYCLE_1).expect("bundled cycle is valid")
}

/// The same network written as polynomials in the step variables:
///
/// ```text
/// F1 = 2[s3] - 1
/// F2 = 2[1 - s3 + s1 s3 - s1 s3 s4] - 1
/// F3 = 2[(1 - s1)(1 - s4) + s2 s4] - 1
/// F4 = 2[(1 - s1)(1 - s3) + s1 s2] - 1
/// ```
pub fn polynomial_focal(code: OrthantCode) -> [f64; 4] {
    assert_eq!(code.dim(), 4);
    let s = |i: usize| if code.bit(i) { 1.0 } else { 0.0 };
    let (s1, s2, s3, s4) = (s(0), s(1), s(2), s(3));
    [
        2.0 * s3 - 1.0,
        2.0 * (1.0 - s3 + s1 * s3 - s1 * s3 * s4) - 1.0,
        2.0 * ((1.0 - s1) * (1.0 - s4) + s2 * s4) - 1.0,
        2.0 * ((1.0 - s1) * (1.0 - s3) + s1 * s2) - 1.0,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_reproduce_table() {
        let net = horseshoe_network();
        for code in OrthantCode::all(4) {
            assert_eq!(net.focal_point(code), &polynomial_focal(code), "orthant {code}");
        }
    }

    #[test]
    fn bundled_cycles_share_start_wall() {
        let (c0, c1) = (cycle_0(), cycle_1());
        assert_eq!(c0.start_wall(), c1.start_wall());
        assert_eq!(c0.start_wall().variable, 0);
    }
}
