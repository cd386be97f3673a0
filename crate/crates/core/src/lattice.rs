//! Lattice points, rectangles, seeded random streams and i.i.d. Exp(1) bulk weights.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, LppError, Result};
use crate::scalar::Scalar;

/// A point of Z^2.
///
/// `PartialOrd` is the coordinatewise order: `a <= b` iff `a.x <= b.x` and
/// `a.y <= b.y`. Points that are not comparable return `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Coord {
    pub x: i64,
    pub y: i64,
}

impl Coord {
    pub const ORIGIN: Coord = Coord { x: 0, y: 0 };
    pub const E1: Coord = Coord { x: 1, y: 0 };
    pub const E2: Coord = Coord { x: 0, y: 1 };

    pub const fn new(x: i64, y: i64) -> Self {
        Coord { x, y }
    }

    pub fn l1_norm(self) -> i64 {
        self.x.abs() + self.y.abs()
    }

    pub fn l1_dist(self, other: Coord) -> i64 {
        (self - other).l1_norm()
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl PartialOrd for Coord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.x.cmp(&other.x), self.y.cmp(&other.y)) {
            (Ordering::Equal, Ordering::Equal) => Some(Ordering::Equal),
            (a, b) if a != Ordering::Greater && b != Ordering::Greater => Some(Ordering::Less),
            (a, b) if a != Ordering::Less && b != Ordering::Less => Some(Ordering::Greater),
            _ => None,
        }
    }
}

impl Add for Coord {
    type Output = Coord;
    fn add(self, o: Coord) -> Coord {
        Coord::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Coord {
    type Output = Coord;
    fn sub(self, o: Coord) -> Coord {
        Coord::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Coord {
    type Output = Coord;
    fn neg(self) -> Coord {
        Coord::new(-self.x, -self.y)
    }
}

impl Mul<Coord> for i64 {
    type Output = Coord;
    fn mul(self, c: Coord) -> Coord {
        Coord::new(self * c.x, self * c.y)
    }
}

/// Closed lattice rectangle `[lo, hi]`; always non-empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    lo: Coord,
    hi: Coord,
}

impl Rect {
    pub fn new(lo: Coord, hi: Coord) -> Result<Self> {
        if !(lo <= hi) {
            return Err(invalid("rect", format!("lower corner {lo} is not below {hi}")));
        }
        Ok(Rect { lo, hi })
    }

    /// The rectangle `[lo, lo + (width-1, height-1)]`.
    pub fn with_size(lo: Coord, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid("rect", "empty rectangle"));
        }
        Rect::new(lo, lo + Coord::new(width as i64 - 1, height as i64 - 1))
    }

    pub fn lo(&self) -> Coord {
        self.lo
    }

    pub fn hi(&self) -> Coord {
        self.hi
    }

    pub fn width(&self) -> usize {
        (self.hi.x - self.lo.x + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.hi.y - self.lo.y + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, c: Coord) -> bool {
        self.lo <= c && c <= self.hi
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.contains(other.lo) && self.contains(other.hi)
    }

    /// Row-major index of `c`; the caller guarantees containment.
    #[inline]
    pub fn index(&self, c: Coord) -> usize {
        (c.y - self.lo.y) as usize * self.width() + (c.x - self.lo.x) as usize
    }

    pub fn checked_index(&self, c: Coord) -> Result<usize> {
        if self.contains(c) {
            Ok(self.index(c))
        } else {
            Err(LppError::OutOfRange {
                point: c.to_string(),
                region: self.to_string(),
            })
        }
    }

    pub fn coord(&self, index: usize) -> Coord {
        let w = self.width();
        Coord::new(self.lo.x + (index % w) as i64, self.lo.y + (index / w) as i64)
    }

    pub fn iter(&self) -> impl Iterator<Item = Coord> + '_ {
        (self.lo.y..=self.hi.y).flat_map(move |y| (self.lo.x..=self.hi.x).map(move |x| Coord::new(x, y)))
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn derive_word(seed: u64, stream: u64, salt: u64) -> u64 {
    let mut s = seed ^ salt.wrapping_mul(0xD1B5_4A32_D192_ED03);
    let a = splitmix64(&mut s);
    let mut t = a ^ stream;
    splitmix64(&mut t) ^ splitmix64(&mut s)
}

fn derive_key(seed: u64, stream: u64, salt: u64) -> [u8; 32] {
    let mut s = derive_word(seed, stream, salt);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
    }
    key
}

const SALT_GENERAL: u64 = 1;
const SALT_CELLS: u64 = 2;
const SALT_CHILD: u64 = 3;

/// A reproducible random stream identified by `(seed, stream)`.
///
/// Streams are counter based (ChaCha8): the weight of a lattice cell is a
/// pure function of `(seed, stream, x, y)`, so fields over overlapping
/// rectangles agree cell for cell and rows can be produced lazily in any
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub const fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    /// Independent child stream, e.g. one per replica or per boundary.
    pub fn substream(&self, tag: u64) -> RngStream {
        RngStream {
            seed: derive_word(self.seed, self.stream, SALT_CHILD),
            stream: tag,
        }
    }

    /// Sequential generator for non-lattice draws.
    pub fn rng(&self) -> StreamRng {
        StreamRng(ChaCha8Rng::from_seed(derive_key(self.seed, self.stream, SALT_GENERAL)))
    }

    /// Generator positioned at cell `(x, y)`; successive draws walk along the row.
    pub fn cell_rng(&self, x: i64, y: i64) -> StreamRng {
        let mut rng = ChaCha8Rng::from_seed(derive_key(self.seed, self.stream, SALT_CELLS));
        rng.set_stream(y as u64);
        let offset = (x as u64) ^ (1u64 << 63);
        rng.set_word_pos(2 * offset as u128);
        StreamRng(rng)
    }
}

/// Uniform and exponential draws from a [`RngStream`].
#[derive(Debug, Clone)]
pub struct StreamRng(ChaCha8Rng);

impl StreamRng {
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on the open interval (0, 1), from the top 53 bits of one word.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.0.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn exp1(&mut self) -> f64 {
        -libm::log(self.uniform())
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        // Lemire's multiply-shift with rejection; exact for every n.
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.0.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }
}

/// Inverse-CDF transform of an open-interval uniform: `-ln(u) / rate`.
#[inline]
pub fn exp_from_uniform<T: Scalar>(u: f64, rate: T) -> T {
    T::of(-libm::log(u)) / rate
}

pub fn exp_sample<T: Scalar>(rng: &mut StreamRng, rate: T) -> Result<T> {
    check_rate(rate)?;
    Ok(exp_from_uniform(rng.uniform(), rate))
}

pub(crate) fn check_rate<T: Scalar>(rate: T) -> Result<()> {
    if rate.is_finite() && rate > T::zero() {
        Ok(())
    } else {
        Err(invalid("rate", format!("{rate} is not a positive finite rate")))
    }
}

/// Source of bulk weights by rows.
pub trait WeightRows<T: Scalar>: Sync {
    fn rect(&self) -> Rect;

    /// Writes the weights of row `y` for `x0..x0 + out.len()` into `out`.
    fn fill_row(&self, y: i64, x0: i64, out: &mut [T]);
}

/// Materialized weights over a rectangle, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField<T> {
    rect: Rect,
    values: Vec<T>,
}

impl<T: Scalar> WeightField<T> {
    pub fn new(rect: Rect, values: Vec<T>) -> Result<Self> {
        if values.len() != rect.len() {
            return Err(invalid(
                "values",
                format!("expected {} weights for {rect}, got {}", rect.len(), values.len()),
            ));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= T::zero())) {
            return Err(invalid("values", format!("weight {bad} is not finite and non-negative")));
        }
        Ok(WeightField { rect, values })
    }

    pub fn from_fn(rect: Rect, mut f: impl FnMut(Coord) -> T) -> Result<Self> {
        let values = rect.iter().map(&mut f).collect();
        WeightField::new(rect, values)
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, c: Coord) -> Result<T> {
        Ok(self.values[self.rect.checked_index(c)?])
    }

    #[inline]
    pub fn at(&self, c: Coord) -> T {
        self.values[self.rect.index(c)]
    }

    pub fn set(&mut self, c: Coord, v: T) -> Result<()> {
        let i = self.rect.checked_index(c)?;
        self.values[i] = v;
        Ok(())
    }

    pub fn row(&self, y: i64) -> &[T] {
        let w = self.rect.width();
        let start = (y - self.rect.lo().y) as usize * w;
        &self.values[start..start + w]
    }

    /// Copy of the weights on a sub-rectangle.
    pub fn restrict(&self, sub: Rect) -> Result<Self> {
        if !self.rect.contains_rect(&sub) {
            return Err(invalid("sub", format!("{sub} is not inside {}", self.rect)));
        }
        let values = sub.iter().map(|c| self.at(c)).collect();
        Ok(WeightField { rect: sub, values })
    }
}

impl<T: Scalar> WeightRows<T> for WeightField<T> {
    fn rect(&self) -> Rect {
        self.rect
    }

    fn fill_row(&self, y: i64, x0: i64, out: &mut [T]) {
        let start = self.rect.index(Coord::new(x0, y));
        out.copy_from_slice(&self.values[start..start + out.len()]);
    }
}

/// i.i.d. Exp(1) weights drawn on demand; identical to [`sample_weight_field`]
/// over the same stream.
#[derive(Debug, Clone, Copy)]
pub struct LazyWeights {
    stream: RngStream,
    rect: Rect,
}

impl LazyWeights {
    pub fn new(stream: RngStream, rect: Rect) -> Self {
        LazyWeights { stream, rect }
    }

    pub fn stream(&self) -> RngStream {
        self.stream
    }

    /// Same stream over another rectangle.
    pub fn with_rect(&self, rect: Rect) -> Self {
        LazyWeights { stream: self.stream, rect }
    }
}

impl<T: Scalar> WeightRows<T> for LazyWeights {
    fn rect(&self) -> Rect {
        self.rect
    }

    fn fill_row(&self, y: i64, x0: i64, out: &mut [T]) {
        let mut rng = self.stream.cell_rng(x0, y);
        for v in out.iter_mut() {
            *v = T::of(rng.exp1());
        }
    }
}

/// i.i.d. Exp(1) weights on `rect`, deterministic in `(stream, rect)`.
pub fn sample_weight_field<T: Scalar>(stream: RngStream, rect: Rect) -> WeightField<T> {
    let lazy = LazyWeights::new(stream, rect);
    let mut values = vec![T::zero(); rect.len()];
    let w = rect.width();
    for (j, row) in values.chunks_exact_mut(w).enumerate() {
        lazy.fill_row(rect.lo().y + j as i64, rect.lo().x, row);
    }
    WeightField { rect, values }
}
