//! Orbits of the doubling and tripling maps as shifts on digit streams.
//!
//! Iterating `2x mod 1` in floating point throws away one mantissa bit per
//! step and reaches 0 after about 53 steps from any double. Instead, each orbit
//! keeps a window of the next base-`b` digits of the current point and
//! multiplication by `b` becomes "shift the window, pull one more digit".
//! The digit source determines which point is being iterated: random digits
//! give a point drawn from the invariant measure, long division gives an exact
//! rational, and the exact binary expansion of a double gives that double.

use rand_chacha::rand_core::RngCore;

use crate::rng::{BitReader, ChaCha8Rng};

/// `3^40`, the largest power of three that fits in a `u64`.
pub(crate) const POW3_40: u64 = 12_157_665_459_056_928_801;
const POW3_39: u64 = POW3_40 / 3;
const TERNARY_WINDOW: u32 = 40;

/// Supplies the base-`b` digits of a point after the window.
#[derive(Debug, Clone)]
pub enum DigitSource {
    /// Fair random bits (base 2).
    RandomBits { rng: ChaCha8Rng, bits: BitReader },
    /// Random digits from `{0, 2}` (base 3): a Cantor-distributed point.
    RandomCantor { rng: ChaCha8Rng, bits: BitReader },
    /// Digits of `p/q` by long division.
    Rational { p: u64, q: u64, base: u64 },
    /// Digits of `num / 2^exp`, exactly.
    Dyadic { num: u128, exp: u32, base: u64 },
    /// Floating-point digit extraction for doubles too small for `Dyadic`.
    Float { r: f64, base: u64 },
}

impl DigitSource {
    pub fn random_bits(rng: ChaCha8Rng) -> Self {
        DigitSource::RandomBits { rng, bits: BitReader::new() }
    }

    pub fn random_cantor(rng: ChaCha8Rng) -> Self {
        DigitSource::RandomCantor { rng, bits: BitReader::new() }
    }

    /// The expansion of `p/q` (with `p < q`).
    pub fn rational(p: u64, q: u64, base: u64) -> Self {
        assert!(q > 0 && p < q, "need 0 <= p < q");
        DigitSource::Rational { p, q, base }
    }

    /// The exact expansion of a double in `[0, 1)`.
    pub fn of_f64(x: f64, base: u64) -> Self {
        assert!((0.0..1.0).contains(&x), "point must lie in [0, 1)");
        match f64_to_dyadic(x) {
            Some((num, exp)) => DigitSource::Dyadic { num, exp, base },
            None => DigitSource::Float { r: x, base },
        }
    }

    #[inline]
    pub fn next_digit(&mut self) -> u64 {
        match self {
            DigitSource::RandomBits { rng, bits } => bits.bit(rng),
            DigitSource::RandomCantor { rng, bits } => 2 * bits.bit(rng),
            DigitSource::Rational { p, q, base } => {
                let t = *p as u128 * *base as u128;
                *p = (t % *q as u128) as u64;
                (t / *q as u128) as u64
            }
            DigitSource::Dyadic { num, exp, base } => {
                let t = *num * *base as u128;
                let d = t >> *exp;
                *num = t & ((1u128 << *exp) - 1);
                d as u64
            }
            DigitSource::Float { r, base } => {
                let t = *r * *base as f64;
                let d = (t.floor() as u64).min(*base - 1);
                *r = t - d as f64;
                d
            }
        }
    }
}

/// `x = num / 2^exp` exactly, when `exp <= 126` (so `3 num` fits in `u128`).
pub(crate) fn f64_to_dyadic(x: f64) -> Option<(u128, u32)> {
    if x == 0.0 {
        return Some((0, 1));
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut e) = if biased == 0 { (frac, -1074i64) } else { (frac | (1u64 << 52), biased - 1075) };
    while m & 1 == 0 && e < 0 {
        m >>= 1;
        e += 1;
    }
    let exp = -e;
    if (1..=126).contains(&exp) {
        Some((m as u128, exp as u32))
    } else {
        None
    }
}

/// A point of the doubling (`base = 2`) or tripling (`base = 3`) map.
#[derive(Debug, Clone)]
pub struct DigitOrbit {
    base: u64,
    window: u64,
    source: DigitSource,
}

impl DigitOrbit {
    pub fn new(base: u64, mut source: DigitSource) -> Self {
        assert!(base == 2 || base == 3, "digit orbits are binary or ternary");
        let mut window = 0u64;
        if base == 2 {
            for _ in 0..64 {
                window = (window << 1) | source.next_digit();
            }
        } else {
            for _ in 0..TERNARY_WINDOW {
                window = window * 3 + source.next_digit();
            }
        }
        Self { base, window, source }
    }

    /// Current point, truncated to double precision (always `< 1`).
    #[inline]
    pub fn value(&self) -> f64 {
        if self.base == 2 {
            (self.window >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
        } else {
            (self.window as f64 / POW3_40 as f64).min(1.0 - f64::EPSILON / 2.0)
        }
    }

    /// Applies the map once.
    #[inline]
    pub fn advance(&mut self) {
        let d = self.source.next_digit();
        self.window = if self.base == 2 { (self.window << 1) | d } else { (self.window % POW3_39) * 3 + d };
    }
}

impl Iterator for DigitOrbit {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.advance();
        Some(self.value())
    }
}

/// Draws a Lebesgue point as a random binary digit stream.
pub fn random_binary_point(rng: &mut ChaCha8Rng) -> DigitOrbit {
    DigitOrbit::new(2, DigitSource::random_bits(fork(rng)))
}

/// Draws a Cantor-measure point as a random `{0, 2}` ternary stream.
pub fn random_cantor_point(rng: &mut ChaCha8Rng) -> DigitOrbit {
    DigitOrbit::new(3, DigitSource::random_cantor(fork(rng)))
}

// Child generator seeded from 256 bits of the parent stream.
fn fork(rng: &mut ChaCha8Rng) -> ChaCha8Rng {
    use rand_chacha::rand_core::SeedableRng;
    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    ChaCha8Rng::from_seed(seed)
}
