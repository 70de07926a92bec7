//! Polyline path algebra and the exact sup metric
//! `d(f, g) = sup_{x ∈ [0,1]} |f(x) − g(x)|` on `C[0,1]`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::regime::RegimeConfig;
use crate::{Error, Result};

/// A continuous piecewise-linear path `[0, 1] → R^d` with ordered breakpoints.
///
/// Paths live on their native knot grids; no common grid is ever forced, so
/// the sup metric between two polylines stays exact. Coincident breakpoints
/// (numerical ties, e.g. underflowed knots of a long exponential flight) are
/// merged on construction keeping the later value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "PathRepr", try_from = "PathRepr")]
pub struct Polyline {
    dim: usize,
    knots: Vec<f64>,
    /// Flat storage, `dim` coordinates per knot.
    values: Vec<f64>,
}

/// Wire format: one JSON object per path `{d, t: […], v: [[…]…]}`.
#[derive(Serialize, Deserialize)]
struct PathRepr {
    d: usize,
    t: Vec<f64>,
    v: Vec<Vec<f64>>,
}

impl From<Polyline> for PathRepr {
    fn from(p: Polyline) -> Self {
        let v = p
            .values
            .chunks(p.dim)
            .map(|chunk| chunk.to_vec())
            .collect();
        PathRepr {
            d: p.dim,
            t: p.knots,
            v,
        }
    }
}

impl TryFrom<PathRepr> for Polyline {
    type Error = Error;

    fn try_from(repr: PathRepr) -> Result<Polyline> {
        let mut values = Vec::with_capacity(repr.t.len() * repr.d);
        for point in &repr.v {
            if point.len() != repr.d {
                return Err(Error::MalformedPath(format!(
                    "point has {} coordinates, path dimension is {}",
                    point.len(),
                    repr.d
                )));
            }
            values.extend_from_slice(point);
        }
        Polyline::new(repr.d, repr.t, values)
    }
}

impl Polyline {
    /// Builds a polyline from breakpoints and flat values (`dim` per knot).
    ///
    /// Exact duplicate breakpoints are merged keeping the later value; the
    /// result must start at 0, end at 1, and be strictly increasing.
    pub fn new(dim: usize, knots: Vec<f64>, values: Vec<f64>) -> Result<Polyline> {
        if dim == 0 {
            return Err(Error::MalformedPath("dimension must be >= 1".into()));
        }
        if values.len() != knots.len() * dim {
            return Err(Error::MalformedPath(format!(
                "{} knots with dimension {} need {} values, got {}",
                knots.len(),
                dim,
                knots.len() * dim,
                values.len()
            )));
        }
        let mut merged_knots: Vec<f64> = Vec::with_capacity(knots.len());
        let mut merged_values: Vec<f64> = Vec::with_capacity(values.len());
        for (i, &t) in knots.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::MalformedPath(format!("non-finite breakpoint {t}")));
            }
            let point = &values[i * dim..(i + 1) * dim];
            if point.iter().any(|x| !x.is_finite()) {
                return Err(Error::MalformedPath(format!(
                    "non-finite value at breakpoint {t}"
                )));
            }
            match merged_knots.last() {
                Some(&prev) if t == prev => {
                    // Numerical tie: keep the later value.
                    let start = merged_values.len() - dim;
                    merged_values[start..].copy_from_slice(point);
                }
                Some(&prev) if t < prev => {
                    return Err(Error::MalformedPath(format!(
                        "breakpoints not increasing: {t} after {prev}"
                    )));
                }
                _ => {
                    merged_knots.push(t);
                    merged_values.extend_from_slice(point);
                }
            }
        }
        if merged_knots.len() < 2 {
            return Err(Error::MalformedPath(
                "a polyline needs at least two distinct breakpoints".into(),
            ));
        }
        if merged_knots[0] != 0.0 {
            return Err(Error::MalformedPath(format!(
                "first breakpoint must be 0, got {}",
                merged_knots[0]
            )));
        }
        if *merged_knots.last().unwrap() != 1.0 {
            return Err(Error::MalformedPath(format!(
                "last breakpoint must be 1, got {}",
                merged_knots.last().unwrap()
            )));
        }
        Ok(Polyline {
            dim,
            knots: merged_knots,
            values: merged_values,
        })
    }

    /// The constant-zero path in `R^d`.
    pub fn zero(dim: usize) -> Polyline {
        Polyline {
            dim,
            knots: vec![0.0, 1.0],
            values: vec![0.0; 2 * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_knots(&self) -> usize {
        self.knots.len()
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Value at the `i`-th breakpoint (0-based).
    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// Linear interpolation at `t ∈ [0, 1]`; exact at breakpoints.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::TimeOutOfRange(t));
        }
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out);
        Ok(out)
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) {
        // Index of the first knot > t; the segment is [idx-1, idx].
        let idx = self.knots.partition_point(|&k| k <= t);
        if idx == self.knots.len() {
            out.copy_from_slice(self.point(self.knots.len() - 1));
            return;
        }
        let lo = idx - 1;
        let (t0, t1) = (self.knots[lo], self.knots[idx]);
        if t == t0 {
            out.copy_from_slice(self.point(lo));
            return;
        }
        let lambda = (t - t0) / (t1 - t0);
        let (p0, p1) = (self.point(lo), self.point(idx));
        for ((o, &a), &b) in out.iter_mut().zip(p0).zip(p1) {
            *o = a + lambda * (b - a);
        }
    }
}

/// Exact `sup_{t ∈ [0,1]} |a(t) − b(t)|` (Euclidean norm on `R^d`).
///
/// Between adjacent points of the union of both breakpoint sets the
/// difference is affine, so its norm is convex and attains its maximum at an
/// endpoint; scanning the union is therefore exact, not an approximation.
pub fn sup_distance(a: &Polyline, b: &Polyline) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    let d = a.dim;
    let mut best_sq = 0.0f64;
    // Segment cursors: knot index of the current segment start.
    let (mut sa, mut sb) = (0usize, 0usize);
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut pa = [0.0f64; 8];
    let mut pb = [0.0f64; 8];
    let mut buf_a: Vec<f64> = Vec::new();
    let mut buf_b: Vec<f64> = Vec::new();
    let (pa, pb): (&mut [f64], &mut [f64]) = if d <= 8 {
        (&mut pa[..d], &mut pb[..d])
    } else {
        buf_a.resize(d, 0.0);
        buf_b.resize(d, 0.0);
        (&mut buf_a[..], &mut buf_b[..])
    };
    while ia < a.knots.len() || ib < b.knots.len() {
        let t = match (a.knots.get(ia), b.knots.get(ib)) {
            (Some(&ta), Some(&tb)) if ta <= tb => {
                ia += 1;
                if ta == tb {
                    ib += 1;
                }
                ta
            }
            (Some(_), Some(&tb)) => {
                ib += 1;
                tb
            }
            (Some(&ta), None) => {
                ia += 1;
                ta
            }
            (None, Some(&tb)) => {
                ib += 1;
                tb
            }
            (None, None) => unreachable!(),
        };
        eval_hinted(a, t, &mut sa, pa);
        eval_hinted(b, t, &mut sb, pb);
        let mut acc = 0.0;
        for (&x, &y) in pa.iter().zip(pb.iter()) {
            let diff = x - y;
            acc += diff * diff;
        }
        best_sq = best_sq.max(acc);
    }
    Ok(best_sq.sqrt())
}

/// Evaluation that advances a segment cursor; `t` never decreases between
/// calls. Exact (returns the stored point) whenever `t` is a knot of `p`.
fn eval_hinted(p: &Polyline, t: f64, cursor: &mut usize, out: &mut [f64]) {
    while *cursor + 2 < p.knots.len() && p.knots[*cursor + 1] <= t {
        *cursor += 1;
    }
    let (t0, t1) = (p.knots[*cursor], p.knots[*cursor + 1]);
    if t <= t0 {
        out.copy_from_slice(p.point(*cursor));
        return;
    }
    if t >= t1 {
        out.copy_from_slice(p.point(*cursor + 1));
        return;
    }
    let lambda = (t - t0) / (t1 - t0);
    let (p0, p1) = (p.point(*cursor), p.point(*cursor + 1));
    for ((o, &x), &y) in out.iter_mut().zip(p0).zip(p1) {
        *o = x + lambda * (y - x);
    }
}

/// `sup_distance(a, 0)`: the largest value norm, attained at a breakpoint.
pub fn sup_norm(a: &Polyline) -> f64 {
    let mut best_sq = 0.0f64;
    for i in 0..a.num_knots() {
        let acc: f64 = a.point(i).iter().map(|x| x * x).sum();
        best_sq = best_sq.max(acc);
    }
    best_sq.sqrt()
}

/// What a sample was drawn from: rescaled flights or the limit law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    Flight,
    Limit,
}

/// Generation metadata carried by every empirical path measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub kind: SampleKind,
    pub regime: RegimeConfig,
    /// Number of flight steps; absent for limit-law samples.
    pub n: Option<u64>,
    pub dim: usize,
    pub seed: u64,
}

/// An equal-weight empirical measure on path space: a finite collection of
/// polylines plus generation metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub paths: Vec<Polyline>,
    pub meta: SampleMeta,
}

impl PathSample {
    pub fn new(paths: Vec<Polyline>, meta: SampleMeta) -> Result<PathSample> {
        if paths.is_empty() {
            return Err(Error::EmptySample);
        }
        let dim = paths[0].dim();
        if let Some(p) = paths.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, p.dim()));
        }
        if meta.dim != dim {
            return Err(Error::DimensionMismatch(meta.dim, dim));
        }
        Ok(PathSample { paths, meta })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.meta.dim
    }

    /// CSV export with columns `path_id,knot_index,t,v_1..v_d`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "path_id,knot_index,t")?;
        for j in 1..=self.dim() {
            write!(w, ",v_{j}")?;
        }
        writeln!(w)?;
        for (id, path) in self.paths.iter().enumerate() {
            for (k, &t) in path.knots().iter().enumerate() {
                write!(w, "{id},{k},{t}")?;
                for x in path.point(k) {
                    write!(w, ",{x}")?;
                }
                writeln!(w)?;
            }
        }
        Ok(())
    }
}
