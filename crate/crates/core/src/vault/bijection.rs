use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::gf2e::{Field, FieldElement};

/// A permutation of the field elements and its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bijection {
    forward: Vec<u16>,
    inverse: Vec<u16>,
}

impl Bijection {
    pub fn identity(field: &Field) -> Self {
        let forward: Vec<u16> = (0..field.order()).map(|x| x as u16).collect();
        Bijection {
            inverse: forward.clone(),
            forward,
        }
    }

    pub fn apply(&self, x: u16) -> FieldElement {
        FieldElement::new(self.forward[x as usize])
    }

    pub fn invert(&self, y: FieldElement) -> u16 {
        self.inverse[y.index()]
    }

    pub fn table(&self) -> &[u16] {
        &self.forward
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

/// Uniform draw from [0, bound) by rejection on 32-bit words.
fn uniform_below(rng: &mut ChaCha20Rng, bound: u32) -> u32 {
    let limit = (1u64 << 32) / bound as u64 * bound as u64;
    loop {
        let r = rng.next_u32();
        if (r as u64) < limit {
            return r % bound;
        }
    }
}

/// Permutation of GF(2^e) seeded by a 32-byte digest.
///
/// ChaCha20 keyed with `seed` (zero nonce, counter from zero) drives a
/// Fisher–Yates shuffle of 0..ρ: for i from ρ−1 down to 1, swap i with
/// j = uniform_below(i + 1). This procedure is part of the record format.
pub fn derive_bijection(seed: &[u8; 32], field: &Field) -> Bijection {
    let mut rng = ChaCha20Rng::from_seed(*seed);
    let order = field.order();
    let mut forward: Vec<u16> = (0..order).map(|x| x as u16).collect();
    for i in (1..order).rev() {
        let j = uniform_below(&mut rng, i as u32 + 1) as usize;
        forward.swap(i, j);
    }
    let mut inverse = vec![0u16; order];
    for (x, &y) in forward.iter().enumerate() {
        inverse[y as usize] = x as u16;
    }
    Bijection { forward, inverse }
}
