use serde::Serialize;

use crate::error::{Error, Result};

/// Exact 1-D star discrepancy of a finite sample in [0, 1).
pub fn star_discrepancy(points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::invalid("star discrepancy of an empty sample"));
    }
    let mut xs = points.to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(star_discrepancy_sorted(&xs))
}

/// Same as [`star_discrepancy`] for input already sorted ascending.
pub(crate) fn star_discrepancy_sorted(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let i = i as f64;
            ((i + 1.0) / n - x).max(x - i / n)
        })
        .fold(0.0, f64::max)
}

/// Cell counts of an r-dimensional point cloud on a g×…×g grid.
///
/// Discrepancy is taken over anchored boxes [0, k_1/g)×…×[0, k_r/g) with
/// 1 ≤ k_i ≤ g, which is a lower bound for the true star discrepancy that
/// converges to it as g grows.
#[derive(Clone, Debug)]
pub struct GridHistogram {
    dim: usize,
    grid: usize,
    counts: Vec<u64>,
    total: u64,
}

impl GridHistogram {
    pub fn new(dim: usize, grid: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::unsupported(format!("grid discrepancy supports 1 to 3 dimensions, got {dim}")));
        }
        if grid < 2 {
            return Err(Error::invalid("grid resolution must be at least 2"));
        }
        Ok(GridHistogram { dim, grid, counts: vec![0; grid.pow(dim as u32)], total: 0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Adds one point; coordinates are clamped into [0, 1).
    pub fn add(&mut self, point: &[f64]) {
        debug_assert_eq!(point.len(), self.dim);
        let g = self.grid;
        let idx = point.iter().fold(0usize, |acc, &x| {
            let c = ((x * g as f64) as isize).clamp(0, g as isize - 1) as usize;
            acc * g + c
        });
        self.counts[idx] += 1;
        self.total += 1;
    }

    /// Adds the point with coordinates `num_i / den`, binned exactly in integers.
    pub fn add_ratio(&mut self, nums: &[u64], den: u64) {
        debug_assert_eq!(nums.len(), self.dim);
        let g = self.grid as u128;
        let idx = nums.iter().fold(0usize, |acc, &v| {
            let c = ((v as u128 * g) / den as u128).min(g - 1) as usize;
            acc * self.grid + c
        });
        self.counts[idx] += 1;
        self.total += 1;
    }

    /// Maximum over anchored grid boxes of |empirical mass − volume|.
    pub fn discrepancy(&self) -> Result<f64> {
        if self.total == 0 {
            return Err(Error::invalid("box discrepancy of an empty sample"));
        }
        let g = self.grid;
        // cumulative counts along each axis in turn
        let mut cum = self.counts.clone();
        let mut stride = 1;
        for _ in 0..self.dim {
            for i in 0..cum.len() {
                if (i / stride) % g != 0 {
                    cum[i] += cum[i - stride];
                }
            }
            stride *= g;
        }
        let n = self.total as f64;
        let mut worst = 0.0f64;
        for (i, &c) in cum.iter().enumerate() {
            let mut vol = 1.0;
            let mut rest = i;
            for _ in 0..self.dim {
                vol *= ((rest % g) + 1) as f64 / g as f64;
                rest /= g;
            }
            worst = worst.max((c as f64 / n - vol).abs());
        }
        Ok(worst)
    }
}

/// Grid-approximate box discrepancy of a point cloud in [0, 1)^r.
pub fn box_discrepancy(points: &[Vec<f64>], grid: usize) -> Result<f64> {
    let dim = points.first().map(Vec::len).ok_or_else(|| Error::invalid("box discrepancy of an empty sample"))?;
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::invalid("points have mixed dimensions"));
    }
    let mut hist = GridHistogram::new(dim, grid)?;
    for p in points {
        hist.add(p);
    }
    hist.discrepancy()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DiscrepancyKind {
    Star,
    Box { dim: usize, grid: usize },
}

/// Discrepancy of the sample accumulated up to `checkpoint`. `value` is NaN
/// when the sample is empty.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub checkpoint: u64,
    pub sample_count: u64,
    pub value: f64,
    pub kind: DiscrepancyKind,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn van_der_corput(mut i: u64) -> f64 {
        let mut x = 0.0;
        let mut scale = 0.5;
        while i > 0 {
            if i & 1 == 1 {
                x += scale;
            }
            scale /= 2.0;
            i >>= 1;
        }
        x
    }

    #[test]
    fn star_examples() {
        assert_eq!(star_discrepancy(&[0.5]).unwrap(), 0.5);
        assert_eq!(star_discrepancy(&[0.0, 0.25, 0.5, 0.75]).unwrap(), 0.25);
        assert_eq!(star_discrepancy(&[0.0; 4]).unwrap(), 1.0);
        assert_eq!(star_discrepancy(&[0.75, 0.0, 0.5, 0.25]).unwrap(), 0.25);
        assert!(star_discrepancy(&[]).is_err());
    }

    #[test]
    fn star_lower_bound() {
        for n in 1..200usize {
            let pts: Vec<f64> = (0..n).map(|i| (2 * i + 1) as f64 / (2 * n) as f64).collect();
            let d = star_discrepancy(&pts).unwrap();
            assert!((d - 0.5 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn van_der_corput_is_low_discrepancy() {
        for n in [1u64, 2, 3, 10, 100, 1000, 4096, 10_000] {
            let pts: Vec<f64> = (0..n).map(van_der_corput).collect();
            let d = star_discrepancy(&pts).unwrap();
            let bound = 2.0 * ((n + 1) as f64).ln() / n as f64;
            assert!(d <= bound && d >= 0.5 / n as f64, "N={n}: {d} > {bound}");
        }
    }

    #[test]
    fn box_origin_point() {
        for (dim, g) in [(1, 64), (2, 64), (3, 16)] {
            let d = box_discrepancy(&[vec![0.0; dim]], g).unwrap();
            let expect = 1.0 - 1.0 / (g as f64).powi(dim as i32);
            assert!((d - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn box_matches_brute_force() {
        let pts: Vec<Vec<f64>> = (0..97u64)
            .map(|i| vec![(i * 37 % 97) as f64 / 97.0, (i * i % 97) as f64 / 97.0])
            .collect();
        let g = 8;
        let mut brute = 0.0f64;
        for k1 in 1..=g {
            for k2 in 1..=g {
                let (a, b) = (k1 as f64 / g as f64, k2 as f64 / g as f64);
                let inside = pts.iter().filter(|p| p[0] < a && p[1] < b).count();
                brute = brute.max((inside as f64 / pts.len() as f64 - a * b).abs());
            }
        }
        assert!((box_discrepancy(&pts, g).unwrap() - brute).abs() < 1e-12);
    }

    #[test]
    fn ratio_binning_is_exact() {
        let mut h = GridHistogram::new(1, 4).unwrap();
        h.add_ratio(&[1], 4);
        h.add_ratio(&[3], 4);
        let mut g = GridHistogram::new(1, 4).unwrap();
        g.add(&[0.25]);
        g.add(&[0.75]);
        assert_eq!(h.counts, g.counts);
        assert!(GridHistogram::new(4, 4).is_err());
        assert!(GridHistogram::new(2, 1).is_err());
    }
}
