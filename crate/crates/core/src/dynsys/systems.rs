//! The built-in measure-preserving systems.

use std::f64::consts::LN_2;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::dynsys::cantor::{cantor_cdf, cantor_integral};
use crate::dynsys::orbit::{random_binary_point, random_cantor_point, DigitOrbit, DigitSource};
use crate::rng::{self, uniform_open, ChaCha8Rng};
use crate::{Error, Result};

/// Iterates discarded before a Manneville–Pomeau sample is returned.
pub const MP_BURN_IN: u32 = 10_000;
/// Orbit length behind the empirical Manneville–Pomeau ball measure.
pub const MP_OCCUPATION_POINTS: usize = 1_000_000;
const MP_OCCUPATION_SEED: u64 = 0x6d70_6f63_6375_7079;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `min(|x - y|, 1 - |x - y|)`: balls wrap around.
    Circle,
    /// `|x - y|`.
    Interval,
}

impl Metric {
    #[inline]
    pub fn dist(self, x: f64, y: f64) -> f64 {
        let d = (x - y).abs();
        match self {
            Metric::Circle => d.min(1.0 - d),
            Metric::Interval => d,
        }
    }
}

/// Declared decay of correlations for Lipschitz observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum DecayClass {
    /// `c(n) <= C n^{-rate}`.
    Polynomial { rate: f64 },
    /// `c(n) <= C e^{-alpha n^beta}`.
    BetaExponential { alpha: f64, beta: f64 },
}

/// Anything with balls of computable measure.
pub trait BallSpace: Sync {
    type Point: Copy + Send + Sync + std::fmt::Debug;

    fn ball_measure(&self, center: Self::Point, r: f64) -> f64;

    /// Whether [`BallSpace::ball_measure`] is exact (as opposed to estimated).
    fn measure_is_exact(&self) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum SystemKind {
    Doubling,
    TriplingCantor,
    MannevillePomeau { s: f64 },
}

/// A map of `[0, 1)` with its invariant measure.
#[derive(Debug)]
pub struct MapSystem {
    kind: SystemKind,
    occupation: OnceLock<Vec<f64>>,
}

impl Clone for MapSystem {
    fn clone(&self) -> Self {
        Self { kind: self.kind, occupation: OnceLock::new() }
    }
}

impl MapSystem {
    /// `2x mod 1` with Lebesgue measure, circle metric.
    pub fn doubling() -> Self {
        Self { kind: SystemKind::Doubling, occupation: OnceLock::new() }
    }

    /// `3x mod 1` on the middle-third Cantor set with the Cantor measure,
    /// interval metric.
    pub fn tripling_cantor() -> Self {
        Self { kind: SystemKind::TriplingCantor, occupation: OnceLock::new() }
    }

    /// `x + x^{1+s} mod 1`, `0 < s < 1`, interval metric.
    pub fn manneville_pomeau(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::domain(format!("Manneville-Pomeau exponent must lie in (0, 1), got {s}")));
        }
        Ok(Self { kind: SystemKind::MannevillePomeau { s }, occupation: OnceLock::new() })
    }

    pub fn from_kind(kind: SystemKind) -> Result<Self> {
        match kind {
            SystemKind::Doubling => Ok(Self::doubling()),
            SystemKind::TriplingCantor => Ok(Self::tripling_cantor()),
            SystemKind::MannevillePomeau { s } => Self::manneville_pomeau(s),
        }
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn name(&self) -> String {
        match self.kind {
            SystemKind::Doubling => "doubling".into(),
            SystemKind::TriplingCantor => "tripling_cantor".into(),
            SystemKind::MannevillePomeau { s } => format!("manneville_pomeau({s})"),
        }
    }

    pub fn metric(&self) -> Metric {
        match self.kind {
            SystemKind::Doubling => Metric::Circle,
            _ => Metric::Interval,
        }
    }

    #[inline]
    pub fn dist(&self, x: f64, y: f64) -> f64 {
        self.metric().dist(x, y)
    }

    pub fn decay_class(&self) -> DecayClass {
        match self.kind {
            SystemKind::Doubling => DecayClass::BetaExponential { alpha: LN_2, beta: 1.0 },
            SystemKind::TriplingCantor => DecayClass::BetaExponential { alpha: 3f64.ln(), beta: 1.0 },
            SystemKind::MannevillePomeau { s } => DecayClass::Polynomial { rate: 1.0 / s - 1.0 },
        }
    }

    /// Exponent `delta` in the annulus bound `mu(r < d(x, x0) < r + eps) < C eps^delta`.
    pub fn holder_delta(&self) -> Option<f64> {
        match self.kind {
            SystemKind::Doubling => Some(1.0),
            SystemKind::TriplingCantor => Some(LN_2 / 3f64.ln()),
            SystemKind::MannevillePomeau { .. } => None,
        }
    }

    /// One application of the map in floating point. Use [`MapSystem::orbit`]
    /// for long doubling/tripling orbits.
    #[inline]
    pub fn map(&self, x: f64) -> f64 {
        match self.kind {
            SystemKind::Doubling => {
                let y = 2.0 * x;
                if y >= 1.0 {
                    y - 1.0
                } else {
                    y
                }
            }
            SystemKind::TriplingCantor => (3.0 * x).fract(),
            SystemKind::MannevillePomeau { s } => mp_step(x, s),
        }
    }

    /// The orbit `T x, T^2 x, ...` of `x` in `[0, 1)`.
    pub fn orbit(&self, x: f64) -> Orbit {
        match self.kind {
            SystemKind::Doubling => Orbit::Digits(DigitOrbit::new(2, DigitSource::of_f64(x, 2))),
            SystemKind::TriplingCantor => Orbit::Digits(DigitOrbit::new(3, DigitSource::of_f64(x, 3))),
            SystemKind::MannevillePomeau { s } => Orbit::Float { x, s },
        }
    }

    /// The orbit of the rational `p/q` (exact for the digit-shift maps).
    pub fn orbit_rational(&self, p: u64, q: u64) -> Orbit {
        match self.kind {
            SystemKind::Doubling => Orbit::Digits(DigitOrbit::new(2, DigitSource::rational(p, q, 2))),
            SystemKind::TriplingCantor => Orbit::Digits(DigitOrbit::new(3, DigitSource::rational(p, q, 3))),
            SystemKind::MannevillePomeau { s } => Orbit::Float { x: p as f64 / q as f64, s },
        }
    }

    /// Draws `x ~ mu` and returns `(x, orbit of x)`.
    pub fn sample_orbit(&self, rng: &mut ChaCha8Rng) -> (f64, Orbit) {
        match self.kind {
            SystemKind::Doubling => {
                let o = random_binary_point(rng);
                (o.value(), Orbit::Digits(o))
            }
            SystemKind::TriplingCantor => {
                let o = random_cantor_point(rng);
                (o.value(), Orbit::Digits(o))
            }
            SystemKind::MannevillePomeau { s } => {
                let x = mp_sample(rng, s);
                (x, Orbit::Float { x, s })
            }
        }
    }

    /// Draws `x ~ mu`.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.sample_orbit(rng).0
    }

    fn occupation(&self, s: f64) -> &[f64] {
        self.occupation.get_or_init(|| {
            let mut rng = rng::stream(MP_OCCUPATION_SEED, 0);
            let mut x = mp_sample(&mut rng, s);
            let mut pts = Vec::with_capacity(MP_OCCUPATION_POINTS);
            for _ in 0..MP_OCCUPATION_POINTS {
                x = mp_step(x, s);
                pts.push(x);
            }
            pts.sort_by(f64::total_cmp);
            pts
        })
    }
}

impl BallSpace for MapSystem {
    type Point = f64;

    /// Closed-ball measure `mu({y : d(y, center) <= r})`.
    fn ball_measure(&self, c: f64, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        match self.kind {
            SystemKind::Doubling => (2.0 * r).min(1.0),
            SystemKind::TriplingCantor => cantor_cdf((c + r).min(1.0)) - cantor_cdf((c - r).max(0.0)),
            SystemKind::MannevillePomeau { s } => {
                let pts = self.occupation(s);
                let lo = pts.partition_point(|&p| p < c - r);
                let hi = pts.partition_point(|&p| p <= c + r);
                (hi - lo) as f64 / pts.len() as f64
            }
        }
    }

    fn measure_is_exact(&self) -> bool {
        !matches!(self.kind, SystemKind::MannevillePomeau { .. })
    }
}

#[inline]
fn mp_step(x: f64, s: f64) -> f64 {
    let growth = if s == 0.5 { x * x.sqrt() } else { x * x.powf(s) };
    let y = x + growth;
    if y >= 1.0 {
        y - 1.0
    } else {
        y
    }
}

fn mp_sample(rng: &mut ChaCha8Rng, s: f64) -> f64 {
    let mut x = uniform_open(rng);
    for _ in 0..MP_BURN_IN {
        x = mp_step(x, s);
    }
    x
}

/// A lazily generated orbit, `T x, T^2 x, ...`.
// Orbits live on the stack of hot loops; boxing the digit state would cost more than it saves.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
pub enum Orbit {
    Digits(DigitOrbit),
    Float { x: f64, s: f64 },
}

impl Iterator for Orbit {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        match self {
            Orbit::Digits(o) => o.next(),
            Orbit::Float { x, s } => {
                *x = mp_step(*x, *s);
                Some(*x)
            }
        }
    }
}

/// `(3x mod 1, 2y mod 1)` on `[0, 1]^2` with the product of the Cantor measure
/// in `x` and Lebesgue measure in `y`, Euclidean metric.
///
/// Lebesgue fibres make every annulus of width `eps` cost at most `C sqrt(eps)`
/// regardless of how singular the first factor is.
#[derive(Debug, Clone, Default)]
pub struct ProductSystem;

impl ProductSystem {
    pub fn new() -> Self {
        ProductSystem
    }

    pub fn holder_delta(&self) -> f64 {
        0.5
    }

    pub fn decay_class(&self) -> DecayClass {
        DecayClass::BetaExponential { alpha: LN_2, beta: 1.0 }
    }

    pub fn map(&self, p: (f64, f64)) -> (f64, f64) {
        ((3.0 * p.0).fract(), (2.0 * p.1).fract())
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let x = random_cantor_point(rng).value();
        (x, rng::uniform(rng))
    }

    pub fn dist(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        (a.0 - b.0).hypot(a.1 - b.1)
    }
}

const PRODUCT_QUADRATURE_TOL: f64 = 1e-15;

impl BallSpace for ProductSystem {
    type Point = (f64, f64);

    fn ball_measure(&self, (x0, y0): (f64, f64), r: f64) -> f64 {
        if !(r > 0.0) {
            return 0.0;
        }
        let r2 = r * r;
        // vertical chord of the disc above x, clipped to [0, 1]
        let chord = move |x: f64| {
            let h2 = r2 - (x - x0) * (x - x0);
            if h2 <= 0.0 {
                return 0.0;
            }
            let h = h2.sqrt();
            ((y0 + h).min(1.0) - (y0 - h).max(0.0)).max(0.0)
        };
        let mut kinks = vec![x0 - r, x0 + r];
        for edge in [y0, 1.0 - y0] {
            if r > edge {
                let w = (r2 - edge * edge).sqrt();
                kinks.extend([x0 - w, x0 + w]);
            }
        }
        cantor_integral(&chord, &kinks, PRODUCT_QUADRATURE_TOL)
    }

    fn measure_is_exact(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BuiltinName {
    Doubling,
    TriplingCantor,
    MannevillePomeau { s: f64 },
    ProductExample,
}

#[derive(Debug, Clone)]
pub enum Builtin {
    Interval(MapSystem),
    Product(ProductSystem),
}

impl Builtin {
    pub fn interval(self) -> Result<MapSystem> {
        match self {
            Builtin::Interval(s) => Ok(s),
            Builtin::Product(_) => Err(Error::Unsupported("the product example is two-dimensional".into())),
        }
    }
}

pub fn builtin_system(name: BuiltinName) -> Result<Builtin> {
    Ok(match name {
        BuiltinName::Doubling => Builtin::Interval(MapSystem::doubling()),
        BuiltinName::TriplingCantor => Builtin::Interval(MapSystem::tripling_cantor()),
        BuiltinName::MannevillePomeau { s } => Builtin::Interval(MapSystem::manneville_pomeau(s)?),
        BuiltinName::ProductExample => Builtin::Product(ProductSystem::new()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_measure_examples() {
        let d = MapSystem::doubling();
        assert!((d.ball_measure(0.5, 0.1) - 0.2).abs() < 1e-15);
        assert_eq!(d.ball_measure(0.0, 0.7), 1.0);
        let c = MapSystem::tripling_cantor();
        for k in 1..12 {
            let m = c.ball_measure(0.0, 3f64.powi(-k));
            assert!((m / 2f64.powi(-k) - 1.0).abs() < 1e-9, "k={k}");
        }
        assert!(MapSystem::manneville_pomeau(1.0).is_err());
        assert!(MapSystem::manneville_pomeau(0.0).is_err());
    }

    #[test]
    fn metadata() {
        let mp = MapSystem::manneville_pomeau(0.5).unwrap();
        assert_eq!(mp.decay_class(), DecayClass::Polynomial { rate: 1.0 });
        assert!(!mp.measure_is_exact());
        assert!((MapSystem::tripling_cantor().holder_delta().unwrap() - 0.630_929_753_571_457_4).abs() < 1e-15);
        assert!((Metric::Circle.dist(0.05, 0.95) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn product_ball_measure_matches_simple_cases() {
        let p = ProductSystem::new();
        // a disc covering the whole square
        assert!((p.ball_measure((0.5, 0.5), 2.0) - 1.0).abs() < 1e-12);
        // a thin disc centred at a Cantor point with y far from the edges:
        // integral of 2 sqrt(r^2 - (x - x0)^2) against the Cantor measure
        let m = p.ball_measure((0.0, 0.5), 0.3);
        let brute = {
            // midpoint sum over 3^12 construction intervals of the same integrand
            let level = 12;
            let mut acc = 0.0;
            for code in 0..(1u32 << level) {
                let mut x = 0.0;
                for j in 0..level {
                    if code >> (level - 1 - j) & 1 == 1 {
                        x += 2.0 * 3f64.powi(-j - 1);
                    }
                }
                x += 0.5 * 3f64.powi(-level);
                let h2 = 0.09 - x * x;
                if h2 > 0.0 {
                    acc += 2.0 * h2.sqrt();
                }
            }
            acc / (1u32 << level) as f64
        };
        assert!((m - brute).abs() < 1e-5, "{m} vs {brute}");
    }

    #[test]
    fn mp_escape_time() {
        let mp = MapSystem::manneville_pomeau(0.5).unwrap();
        let steps = mp.orbit(1e-6).take_while(|&x| x <= 1e-3).count() + 1;
        // independent loop on x + x^{3/2}
        let mut x: f64 = 1e-6;
        let mut n = 0;
        while x <= 1e-3 {
            x += x.powf(1.5);
            n += 1;
        }
        assert_eq!(steps, n);
        assert_eq!(steps, 1942);
    }

    /// Two-sample Kolmogorov–Smirnov statistic.
    fn ks(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut d) = (0, 0, 0.0f64);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        d
    }

    fn preserves_measure(system: &MapSystem, n: usize) {
        let mut rng = rng::stream(99, 0);
        let images: Vec<f64> = (0..n).map(|_| system.sample_orbit(&mut rng).1.next().unwrap()).collect();
        let fresh: Vec<f64> = (0..n).map(|_| system.sample(&mut rng)).collect();
        // 1.95 sqrt(2/n) is the 0.1% critical value
        let crit = 1.95 * (2.0 / n as f64).sqrt();
        let d = ks(images, fresh);
        assert!(d < crit, "{}: {d} >= {crit}", system.name());
    }

    #[test]
    fn invariant_measures_are_preserved() {
        preserves_measure(&MapSystem::doubling(), 1_000_000);
        preserves_measure(&MapSystem::tripling_cantor(), 1_000_000);
        // each draw costs a burn-in
        preserves_measure(&MapSystem::manneville_pomeau(0.5).unwrap(), 20_000);
    }

    #[test]
    fn ball_measures_are_monotone_in_the_radius() {
        let systems = [MapSystem::doubling(), MapSystem::tripling_cantor(), MapSystem::manneville_pomeau(0.5).unwrap()];
        let p = ProductSystem::new();
        for x in [0.0, 0.2, 0.5, 0.77] {
            let mut prev = vec![0.0; 4];
            for k in 0..=40 {
                let r = k as f64 / 40.0;
                let m = [
                    systems[0].ball_measure(x, r),
                    systems[1].ball_measure(x, r),
                    systems[2].ball_measure(x, r),
                    p.ball_measure((x, 0.5), r),
                ];
                for (a, b) in prev.iter().zip(&m) {
                    assert!(*b >= a - 1e-12 && *b <= 1.0 + 1e-12);
                }
                prev = m.to_vec();
            }
        }
    }

    #[test]
    fn orbits_of_fixed_and_periodic_points() {
        let d = MapSystem::doubling();
        assert!(d.orbit(0.0).take(1000).all(|x| x == 0.0));
        let v: Vec<f64> = d.orbit_rational(1, 3).take(4).collect();
        for (got, want) in v.iter().zip([2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0]) {
            assert!((got - want).abs() < 1e-15);
        }
    }
}
