use serde::{Deserialize, Serialize};

use super::field::lcm;
use crate::error::{Error, Result};

/// The three integers attached to a symmetry parameter `n`: `N = lcm(n, 2)`
/// and the exponent modulus `m = lcm(2n, 12)` of the forbidden cross-ratio
/// quotients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldTag {
    pub n: u32,
    #[serde(rename = "N")]
    pub big_n: u32,
    pub m: u32,
}

impl FieldTag {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSymmetry(n));
        }
        Ok(FieldTag {
            n,
            big_n: lcm(n, 2),
            m: lcm(2 * n, 12),
        })
    }

    /// Conductor used for planar points: contains both `ζ_N` and `i`.
    pub fn point_conductor(&self) -> u32 {
        lcm(self.big_n, 4)
    }
}
