//! Reproducible point, pair and triple samples over axis-aligned boxes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

/// An ordered pair of points `(x, y)`.
pub type Pair = (Point, Point);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Region {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::usage(format!(
                "region bounds must be non-empty and of equal length ({} vs {})",
                lower.len(),
                upper.len()
            )));
        }
        for (lo, hi) in lower.iter().zip(&upper) {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::usage(format!("invalid region axis [{lo}, {hi}]")));
            }
        }
        Ok(Region { lower, upper })
    }

    /// `[lo, hi]^d`.
    pub fn cube(lo: f64, hi: f64, dim: usize) -> Result<Self> {
        Region::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Region::cube(lo, hi, 1)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Longest side.
    pub fn diameter(&self) -> f64 {
        self.lower.iter().zip(&self.upper).fold(0.0, |m, (lo, hi)| m.max(hi - lo))
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p.coords().iter().zip(self.lower.iter().zip(&self.upper)).all(|(c, (lo, hi))| lo <= c && c <= hi)
    }

    pub(crate) fn clamp(&self, coords: &mut [f64]) {
        for (c, (lo, hi)) in coords.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *c = c.clamp(*lo, *hi);
        }
    }

    /// Maps a point of the unit cube onto the region.
    fn scale(&self, unit: &[f64]) -> Point {
        let coords = unit
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(u, (lo, hi))| lo + u * (hi - lo))
            .collect();
        Point::from_raw(coords)
    }

    /// Regular lattice with about `budget` nodes, endpoints included.
    pub fn lattice(&self, budget: usize) -> Vec<Point> {
        let d = self.dim();
        let per_axis = ((budget.max(1) as f64).powf(1.0 / d as f64).floor() as usize).max(1);
        let total = per_axis.pow(d as u32);
        (0..total)
            .map(|mut idx| {
                let unit: Vec<f64> = (0..d)
                    .map(|_| {
                        let i = idx % per_axis;
                        idx /= per_axis;
                        if per_axis == 1 {
                            0.5
                        } else {
                            i as f64 / (per_axis - 1) as f64
                        }
                    })
                    .collect();
                self.scale(&unit)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    UniformRandom,
    /// Halton sequence; the seed selects the starting index.
    LowDiscrepancyGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sampler {
    pub region: Region,
    pub count: usize,
    pub seed: u64,
    pub scheme: Scheme,
}

const PRIMES: [u64; 24] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut value = 0.0;
    while index > 0 {
        value += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    value
}

impl Sampler {
    pub fn new(region: Region, count: usize, seed: u64, scheme: Scheme) -> Result<Self> {
        if count == 0 {
            return Err(Error::usage("sampler count must be positive"));
        }
        if scheme == Scheme::LowDiscrepancyGrid && region.dim() > PRIMES.len() {
            return Err(Error::usage(format!("low-discrepancy sampling supports d <= {}", PRIMES.len())));
        }
        Ok(Sampler { region, count, seed, scheme })
    }

    pub fn uniform(region: Region, count: usize, seed: u64) -> Result<Self> {
        Sampler::new(region, count, seed, Scheme::UniformRandom)
    }

    /// The first `n` points of the sequence.
    fn stream(&self, n: usize) -> Vec<Point> {
        let d = self.region.dim();
        match self.scheme {
            Scheme::UniformRandom => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (0..n)
                    .map(|_| {
                        let unit: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
                        self.region.scale(&unit)
                    })
                    .collect()
            }
            Scheme::LowDiscrepancyGrid => {
                let start = 1 + (self.seed % (1 << 32));
                (0..n as u64)
                    .map(|i| {
                        let unit: Vec<f64> = PRIMES[..d].iter().map(|b| radical_inverse(start + i, *b)).collect();
                        self.region.scale(&unit)
                    })
                    .collect()
            }
        }
    }

    /// `count` points.
    pub fn points(&self) -> Vec<Point> {
        self.stream(self.count)
    }

    /// `count` pairs built from consecutive blocks of two points.
    pub fn pairs(&self) -> Vec<Pair> {
        let pts = self.stream(2 * self.count);
        pts.chunks_exact(2).map(|c| (c[0].clone(), c[1].clone())).collect()
    }

    /// `count` triples built from consecutive blocks of three points.
    pub fn triples(&self) -> Vec<[Point; 3]> {
        let pts = self.stream(3 * self.count);
        pts.chunks_exact(3).map(|c| [c[0].clone(), c[1].clone(), c[2].clone()]).collect()
    }
}
