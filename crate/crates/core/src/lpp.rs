//! Point-to-point last-passage values, argmax backpointers and geodesics.
//!
//! Every field is computed by one kernel that works in *frame* coordinates:
//! frame `(i, j)` is the point `origin + (i, j)` for forward fields and
//! `origin - (i, j)` for reversed ones. A backpointer bit is set when the
//! argmax predecessor lies along axis 1; exact ties go to axis 2.

use crate::error::{invalid, LppError, Result};
use crate::lattice::{Coord, Rect, WeightRows};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Up-right paths leaving the origin; the origin is the lower-left corner.
    Forward,
    /// Down-left paths leaving the origin; the origin is the upper-right corner.
    Reversed,
}

impl Orientation {
    /// Unit step away from the origin along axis 1 (`+e1` or `-e1`).
    pub fn step1(self) -> Coord {
        match self {
            Orientation::Forward => Coord::E1,
            Orientation::Reversed => -Coord::E1,
        }
    }

    pub fn step2(self) -> Coord {
        match self {
            Orientation::Forward => Coord::E2,
            Orientation::Reversed => -Coord::E2,
        }
    }

    pub fn to_frame(self, origin: Coord, c: Coord) -> (i64, i64) {
        match self {
            Orientation::Forward => (c.x - origin.x, c.y - origin.y),
            Orientation::Reversed => (origin.x - c.x, origin.y - c.y),
        }
    }

    pub fn from_frame(self, origin: Coord, i: i64, j: i64) -> Coord {
        match self {
            Orientation::Forward => Coord::new(origin.x + i, origin.y + j),
            Orientation::Reversed => Coord::new(origin.x - i, origin.y - j),
        }
    }

    /// The rectangle spanned by `origin` and the opposite corner `far`.
    pub fn span(self, origin: Coord, far: Coord) -> Result<Rect> {
        match self {
            Orientation::Forward => Rect::new(origin, far),
            Orientation::Reversed => Rect::new(far, origin),
        }
    }
}

/// Packed bits over a row-major index space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitGrid {
    len: usize,
    words: Vec<u64>,
}

impl BitGrid {
    pub fn new(len: usize) -> Self {
        BitGrid {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Rows of a DP frame, delivered in frame order.
pub(crate) trait FrameRows<T: Scalar> {
    /// The natural rectangle covered by the frame.
    fn rect(&self) -> Rect;
    fn origin(&self) -> Coord;
    fn orientation(&self) -> Orientation;
    /// Frame row `j` (frame order, length `rect().width()`).
    fn fill(&self, j: usize, out: &mut [T]);

    fn frame_width(&self) -> usize {
        self.rect().width()
    }
}

/// Plain point-to-point frame over bulk weights.
pub(crate) struct PlainFrame<'a, W> {
    pub weights: &'a W,
    pub rect: Rect,
    pub origin: Coord,
    pub orientation: Orientation,
}

impl<'a, W> PlainFrame<'a, W> {
    pub fn new<T: Scalar>(weights: &'a W, origin: Coord, orientation: Orientation) -> Result<Self>
    where
        W: WeightRows<T>,
    {
        let wr = weights.rect();
        if !wr.contains(origin) {
            return Err(LppError::OutOfRange {
                point: origin.to_string(),
                region: wr.to_string(),
            });
        }
        let far = match orientation {
            Orientation::Forward => wr.hi(),
            Orientation::Reversed => wr.lo(),
        };
        Ok(PlainFrame {
            weights,
            rect: orientation.span(origin, far)?,
            origin,
            orientation,
        })
    }
}

/// Fills a frame row from a natural row, reversing it for reversed frames.
pub(crate) fn fill_oriented<T: Scalar, W: WeightRows<T>>(
    weights: &W,
    orientation: Orientation,
    origin: Coord,
    j: i64,
    out: &mut [T],
) {
    match orientation {
        Orientation::Forward => weights.fill_row(origin.y + j, origin.x, out),
        Orientation::Reversed => {
            let x0 = origin.x - out.len() as i64 + 1;
            weights.fill_row(origin.y - j, x0, out);
            out.reverse();
        }
    }
}

impl<'a, T: Scalar, W: WeightRows<T>> FrameRows<T> for PlainFrame<'a, W> {
    fn rect(&self) -> Rect {
        self.rect
    }

    fn origin(&self) -> Coord {
        self.origin
    }

    fn orientation(&self) -> Orientation {
        self.orientation
    }

    fn fill(&self, j: usize, out: &mut [T]) {
        fill_oriented(self.weights, self.orientation, self.origin, j as i64, out);
    }
}

/// Row-by-row DP sweep. `emit(j, values, dirs)` sees each finished frame row;
/// `dirs[i] == 1` when the argmax predecessor of frame `(i, j)` is `(i-1, j)`.
pub(crate) fn sweep<T: Scalar, F: FrameRows<T> + ?Sized>(
    frame: &F,
    rows: usize,
    mut emit: impl FnMut(usize, &[T], &[u8]),
) {
    let w = frame.frame_width();
    let mut wrow = vec![T::zero(); w];
    let mut prev = vec![T::zero(); w];
    let mut cur = vec![T::zero(); w];
    let mut dirs = vec![0u8; w];
    for j in 0..rows {
        frame.fill(j, &mut wrow);
        if j == 0 {
            cur[0] = wrow[0];
            dirs[0] = 0;
            for i in 1..w {
                cur[i] = cur[i - 1] + wrow[i];
                dirs[i] = 1;
            }
        } else {
            cur[0] = prev[0] + wrow[0];
            dirs[0] = 0;
            for i in 1..w {
                let left = cur[i - 1];
                let down = prev[i];
                if left > down {
                    cur[i] = left + wrow[i];
                    dirs[i] = 1;
                } else {
                    cur[i] = down + wrow[i];
                    dirs[i] = 0;
                }
            }
        }
        emit(j, &cur, &dirs);
        std::mem::swap(&mut prev, &mut cur);
    }
}

/// Last-passage values and backpointers over a rectangle.
///
/// Values and bits are stored row-major in natural coordinates whatever the
/// orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct PassageField<T> {
    rect: Rect,
    origin: Coord,
    orientation: Orientation,
    stationary: bool,
    values: Vec<T>,
    dirs: BitGrid,
}

impl<T: Scalar> PassageField<T> {
    pub(crate) fn build<F: FrameRows<T> + ?Sized>(frame: &F, stationary: bool) -> Self {
        let rect = frame.rect();
        let (w, h) = (rect.width(), rect.height());
        let len = w * h;
        let mut values = vec![T::zero(); len];
        let mut dirs = BitGrid::new(len);
        let reversed = frame.orientation() == Orientation::Reversed;
        sweep(frame, h, |j, row, d| {
            for i in 0..w {
                let f = j * w + i;
                let idx = if reversed { len - 1 - f } else { f };
                values[idx] = row[i];
                if d[i] == 1 {
                    dirs.set(idx, true);
                }
            }
        });
        PassageField {
            rect,
            origin: frame.origin(),
            orientation: frame.orientation(),
            stationary,
            values,
            dirs,
        }
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn origin(&self) -> Coord {
        self.origin
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Whether the first row and column carry stationary boundary increments.
    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, c: Coord) -> Result<T> {
        Ok(self.values[self.rect.checked_index(c)?])
    }

    #[inline]
    pub fn at(&self, c: Coord) -> T {
        self.values[self.rect.index(c)]
    }

    /// The point the geodesic from the origin to `c` visits just before `c`.
    pub fn predecessor(&self, c: Coord) -> Option<Coord> {
        if c == self.origin || !self.rect.contains(c) {
            return None;
        }
        let along1 = self.dirs.get(self.rect.index(c));
        Some(if along1 {
            c - self.orientation.step1()
        } else {
            c - self.orientation.step2()
        })
    }

    /// Geodesic from the origin to `target`, both included.
    pub fn geodesic(&self, target: Coord) -> Result<Vec<Coord>> {
        self.rect.checked_index(target)?;
        let mut path = vec![target];
        let mut c = target;
        while let Some(p) = self.predecessor(c) {
            path.push(p);
            c = p;
        }
        path.reverse();
        Ok(path)
    }

    /// Signed exit point of the geodesic to `target` in a stationary field:
    /// `+k` when it leaves the axis-1 boundary at frame `(k, 0)`, `-l` when it
    /// leaves the axis-2 boundary at frame `(0, l)`.
    pub fn exit_point(&self, target: Coord) -> Result<i64> {
        if !self.stationary {
            return Err(invalid("field", "exit points need a stationary field"));
        }
        self.rect.checked_index(target)?;
        if target == self.origin {
            return Err(invalid("target", "the corner has no exit point"));
        }
        let mut c = target;
        loop {
            let (i, j) = self.orientation.to_frame(self.origin, c);
            if j == 0 {
                return Ok(i);
            }
            if i == 0 {
                return Ok(-j);
            }
            c = self.predecessor(c).ok_or_else(|| LppError::Internal("broken backpointer chain".into()))?;
        }
    }

    pub(crate) fn dir_bit(&self, c: Coord) -> bool {
        self.dirs.get(self.rect.index(c))
    }
}

/// Point-to-point passage values from `origin` over the part of `weights`
/// reachable in the given orientation. The origin's own weight counts.
pub fn lpp_passage<T: Scalar, W: WeightRows<T>>(
    weights: &W,
    origin: Coord,
    orientation: Orientation,
) -> Result<PassageField<T>> {
    let frame = PlainFrame::new(weights, origin, orientation)?;
    Ok(PassageField::build(&frame, false))
}

/// Passage value from `origin` to `target` with O(width) memory.
pub fn passage_value<T: Scalar, W: WeightRows<T>>(
    weights: &W,
    origin: Coord,
    target: Coord,
) -> Result<T> {
    let orientation = if origin <= target {
        Orientation::Forward
    } else if target <= origin {
        Orientation::Reversed
    } else {
        return Err(invalid("target", format!("{target} is not comparable with {origin}")));
    };
    let wr = weights.rect();
    for c in [origin, target] {
        wr.checked_index(c)?;
    }
    let frame = PlainFrame {
        weights,
        rect: orientation.span(origin, target)?,
        origin,
        orientation,
    };
    let rows = frame.rect.height();
    let mut last = T::zero();
    sweep(&frame, rows, |j, row, _| {
        if j + 1 == rows {
            last = row[row.len() - 1];
        }
    });
    Ok(last)
}
