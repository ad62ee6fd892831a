//! Self-maps of the built-in spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{SpaceDescriptor, WeakMetric};
use crate::point::Point;
use crate::spaces::AsymNorm1D;

/// Anything that maps points of R^d to points of R^d.
pub trait SelfMap {
    fn dimension(&self) -> usize;
    fn apply(&self, x: &Point) -> Result<Point>;
}

/// A continuous piecewise-linear map of R.
///
/// Segment `i` covers `[breakpoints[i-1], breakpoints[i])` and evaluates
/// `slopes[i] * x + intercepts[i]`; there is one more segment than breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear1D {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    intercepts: Vec<f64>,
}

const CONTINUITY_TOL: f64 = 1e-12;

impl PiecewiseLinear1D {
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, intercepts: Vec<f64>) -> Result<Self> {
        if slopes.len() != breakpoints.len() + 1 || intercepts.len() != slopes.len() {
            return Err(Error::usage(format!(
                "piecewise_linear_1d: {} breakpoints need {} slopes and intercepts, got {} and {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                slopes.len(),
                intercepts.len()
            )));
        }
        if breakpoints.iter().chain(&slopes).chain(&intercepts).any(|v| !v.is_finite()) {
            return Err(Error::usage("piecewise_linear_1d: parameters must be finite"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::usage("piecewise_linear_1d: breakpoints must be strictly increasing"));
        }
        for (i, b) in breakpoints.iter().enumerate() {
            let left = slopes[i] * b + intercepts[i];
            let right = slopes[i + 1] * b + intercepts[i + 1];
            if (left - right).abs() > CONTINUITY_TOL * left.abs().max(right.abs()).max(1.0) {
                return Err(Error::usage(format!(
                    "piecewise_linear_1d: discontinuous at breakpoint {b} ({left} vs {right})"
                )));
            }
        }
        Ok(PiecewiseLinear1D { breakpoints, slopes, intercepts })
    }

    /// Interpolates the knots `(xs[i], ys[i])` and extends with the given end slopes.
    pub fn from_knots(xs: &[f64], ys: &[f64], left_slope: f64, right_slope: f64) -> Result<Self> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(Error::usage("piecewise_linear_1d: need as many knot values as knots (at least one)"));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::usage("piecewise_linear_1d: knots must be strictly increasing"));
        }
        let mut slopes = vec![left_slope];
        let mut intercepts = vec![ys[0] - left_slope * xs[0]];
        for i in 0..xs.len() - 1 {
            let s = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
            slopes.push(s);
            intercepts.push(ys[i] - s * xs[i]);
        }
        let last = xs.len() - 1;
        slopes.push(right_slope);
        intercepts.push(ys[last] - right_slope * xs[last]);
        PiecewiseLinear1D::new(xs.to_vec(), slopes, intercepts)
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.breakpoints.partition_point(|b| *b <= x);
        self.slopes[i] * x + self.intercepts[i]
    }

    /// Rejects any segment whose slope leaves the 1-Lipschitz interval of the host norm.
    pub fn validate_against(&self, norm: &AsymNorm1D) -> Result<()> {
        let (lo, hi) = norm.lipschitz_slope_range();
        for (i, s) in self.slopes.iter().enumerate() {
            if *s < lo || *s > hi {
                return Err(Error::usage(format!(
                    "piecewise_linear_1d: slope {s} of segment {i} is outside the 1-Lipschitz range [{lo}, {hi}] \
                     of asym_r({},{})",
                    norm.alpha(),
                    norm.beta()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MapKind {
    Identity,
    /// `|x| + 1` on R.
    AbsPlusOne,
    /// `-x + 1` for `x < 0`, `x + e^{-x}` for `x >= 0`.
    ReflectExp,
    Translation { offset: Vec<f64> },
    /// `x -> A x + b`, `A` stored row-major.
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    PiecewiseLinear(PiecewiseLinear1D),
    /// `x -> (1 - lambda) x + lambda T x`.
    Averaged { inner: Box<MapKind>, lambda: f64 },
}

impl MapKind {
    fn image(&self, x: &[f64]) -> Vec<f64> {
        match self {
            MapKind::Identity => x.to_vec(),
            MapKind::AbsPlusOne => vec![x[0].abs() + 1.0],
            MapKind::ReflectExp => {
                let v = x[0];
                vec![if v < 0.0 { -v + 1.0 } else { v + (-v).exp() }]
            }
            MapKind::Translation { offset } => x.iter().zip(offset).map(|(a, c)| a + c).collect(),
            MapKind::Affine { matrix, offset } => matrix
                .iter()
                .zip(offset)
                .map(|(row, b)| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + b)
                .collect(),
            MapKind::PiecewiseLinear(pl) => vec![pl.eval(x[0])],
            MapKind::Averaged { inner, lambda } => {
                let tx = inner.image(x);
                x.iter().zip(&tx).map(|(a, b)| (1.0 - lambda) * a + lambda * b).collect()
            }
        }
    }

    fn name(&self) -> String {
        match self {
            MapKind::Identity => "identity".into(),
            MapKind::AbsPlusOne => "abs_plus_one".into(),
            MapKind::ReflectExp => "reflect_exp".into(),
            MapKind::Translation { offset } => format!("translation({offset:?})"),
            MapKind::Affine { .. } => "affine".into(),
            MapKind::PiecewiseLinear(_) => "piecewise_linear_1d".into(),
            MapKind::Averaged { inner, lambda } => format!("krasnoselskii_average({}, {lambda})", inner.name()),
        }
    }
}

/// An immutable self-map `T` of a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapDescriptor {
    space: SpaceDescriptor,
    kind: MapKind,
}

fn require_line(space: &SpaceDescriptor, name: &str) -> Result<()> {
    if space.dimension() != 1 {
        return Err(Error::usage(format!("{name} is a map of R; host dimension is {}", space.dimension())));
    }
    Ok(())
}

fn require_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::usage(format!("{what} must be finite")));
    }
    Ok(())
}

impl MapDescriptor {
    pub fn identity(space: &SpaceDescriptor) -> Self {
        MapDescriptor { space: space.clone(), kind: MapKind::Identity }
    }

    pub fn abs_plus_one(space: &SpaceDescriptor) -> Result<Self> {
        require_line(space, "abs_plus_one")?;
        Ok(MapDescriptor { space: space.clone(), kind: MapKind::AbsPlusOne })
    }

    pub fn reflect_exp(space: &SpaceDescriptor) -> Result<Self> {
        require_line(space, "reflect_exp")?;
        Ok(MapDescriptor { space: space.clone(), kind: MapKind::ReflectExp })
    }

    pub fn translation(space: &SpaceDescriptor, offset: Vec<f64>) -> Result<Self> {
        if offset.len() != space.dimension() {
            return Err(Error::DimensionMismatch { expected: space.dimension(), found: offset.len() });
        }
        require_finite(&offset, "translation offset")?;
        Ok(MapDescriptor { space: space.clone(), kind: MapKind::Translation { offset } })
    }

    pub fn affine(space: &SpaceDescriptor, matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self> {
        let d = space.dimension();
        if matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
            return Err(Error::usage(format!("affine matrix must be {d}x{d}")));
        }
        if offset.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: offset.len() });
        }
        require_finite(&offset, "affine offset")?;
        for row in &matrix {
            require_finite(row, "affine matrix")?;
        }
        Ok(MapDescriptor { space: space.clone(), kind: MapKind::Affine { matrix, offset } })
    }

    /// `x -> factor * x`.
    pub fn scaling(space: &SpaceDescriptor, factor: f64) -> Result<Self> {
        let d = space.dimension();
        let matrix = (0..d).map(|i| (0..d).map(|j| if i == j { factor } else { 0.0 }).collect()).collect();
        MapDescriptor::affine(space, matrix, vec![0.0; d])
    }

    /// Validated against the host norm: every segment must be 1-Lipschitz.
    pub fn piecewise_linear(space: &SpaceDescriptor, pl: PiecewiseLinear1D) -> Result<Self> {
        require_line(space, "piecewise_linear_1d")?;
        let norm = space
            .as_asym_1d()
            .ok_or_else(|| Error::usage("piecewise_linear_1d needs a 1-D normed host"))?;
        pl.validate_against(&norm)?;
        Ok(MapDescriptor { space: space.clone(), kind: MapKind::PiecewiseLinear(pl) })
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        self.kind.name()
    }
}

/// `x -> (1 - lambda) x + lambda T x`, the Krasnoselskii-Mann average of `map`.
pub fn krasnoselskii_average(map: &MapDescriptor, lambda: f64) -> Result<MapDescriptor> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::usage(format!("averaging parameter must lie in ]0, 1], got {lambda}")));
    }
    if !map.space.is_vector_space() {
        return Err(Error::usage("averaging needs a vector-space host"));
    }
    Ok(MapDescriptor {
        space: map.space.clone(),
        kind: MapKind::Averaged { inner: Box::new(map.kind.clone()), lambda },
    })
}

impl SelfMap for MapDescriptor {
    fn dimension(&self) -> usize {
        self.space.dimension()
    }

    fn apply(&self, x: &Point) -> Result<Point> {
        x.check_dim(self.space.dimension())?;
        let image = Point::from_raw(self.kind.image(x.coords()));
        if !image.is_finite() {
            return Err(Error::Domain(format!("{} overflows at {x}", self.name())));
        }
        Ok(image)
    }
}

/// Four points `(x, y, Tx, Ty)`: the data a pairwise criterion needs, with
/// or without a global map behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirtualPair {
    pub x: Point,
    pub y: Point,
    pub tx: Point,
    pub ty: Point,
}

impl VirtualPair {
    pub fn new(x: Point, y: Point, tx: Point, ty: Point) -> Result<Self> {
        let d = x.dim();
        for p in [&y, &tx, &ty] {
            p.check_dim(d)?;
        }
        Ok(VirtualPair { x, y, tx, ty })
    }

    pub fn from_map<M: SelfMap + ?Sized>(map: &M, x: &Point, y: &Point) -> Result<Self> {
        Ok(VirtualPair { tx: map.apply(x)?, ty: map.apply(y)?, x: x.clone(), y: y.clone() })
    }

    /// `Tx = y`, `Ty = z_xy`: the two-point configuration that is never firm.
    pub fn nonfirm_configuration(norm: &AsymNorm1D, x: f64, y: f64) -> Result<Self> {
        let z = norm.z_of_pair(x, y)?;
        Ok(VirtualPair {
            x: Point::scalar(x),
            y: Point::scalar(y),
            tx: Point::scalar(y),
            ty: Point::scalar(z),
        })
    }
}

/// Applies `map` to every pair.
pub fn images_of<M: SelfMap + Sync + ?Sized>(map: &M, pairs: &[(Point, Point)]) -> Result<Vec<VirtualPair>> {
    use rayon::prelude::*;
    pairs.par_iter().map(|(x, y)| VirtualPair::from_map(map, x, y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::LpExponent;

    fn s(v: f64) -> Point {
        Point::scalar(v)
    }

    fn line() -> SpaceDescriptor {
        SpaceDescriptor::real_line_abs()
    }

    #[test]
    fn abs_plus_one_values() {
        let t = MapDescriptor::abs_plus_one(&line()).unwrap();
        assert_eq!(t.apply(&s(-3.0)).unwrap().x(), 4.0);
        assert_eq!(t.apply(&s(0.0)).unwrap().x(), 1.0);
        assert_eq!(t.apply(&s(2.0)).unwrap().x(), 3.0);
    }

    #[test]
    fn reflect_exp_values() {
        let t = MapDescriptor::reflect_exp(&line()).unwrap();
        assert_eq!(t.apply(&s(-1.0)).unwrap().x(), 2.0);
        assert_eq!(t.apply(&s(0.0)).unwrap().x(), 1.0);
        assert_eq!(t.apply(&s(1.0)).unwrap().x(), 1.0 + (-1.0f64).exp());
    }

    #[test]
    fn translation_is_an_isometry() {
        let e2 = SpaceDescriptor::rn_lp(LpExponent::Two, 2).unwrap();
        let t = MapDescriptor::translation(&e2, vec![1.0, 1.0]).unwrap();
        let origin = Point::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(t.apply(&origin).unwrap().coords(), &[1.0, 1.0]);
        let a = Point::new(vec![0.5, -2.0]).unwrap();
        let b = Point::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(
            e2.delta(&t.apply(&a).unwrap(), &t.apply(&b).unwrap()).unwrap(),
            e2.delta(&a, &b).unwrap()
        );
    }

    #[test]
    fn dimension_checks() {
        let e2 = SpaceDescriptor::rn_lp(LpExponent::Two, 2).unwrap();
        assert!(MapDescriptor::abs_plus_one(&e2).is_err());
        assert!(MapDescriptor::translation(&e2, vec![1.0]).is_err());
        assert!(MapDescriptor::affine(&e2, vec![vec![1.0, 0.0]], vec![0.0, 0.0]).is_err());
        let t = MapDescriptor::identity(&e2);
        assert!(matches!(t.apply(&s(1.0)), Err(Error::DimensionMismatch { expected: 2, found: 1 })));
    }

    #[test]
    fn averaging() {
        let t = MapDescriptor::abs_plus_one(&line()).unwrap();
        assert!(krasnoselskii_average(&t, 0.0).is_err());
        assert!(krasnoselskii_average(&t, 1.5).is_err());
        let half = krasnoselskii_average(&t, 0.5).unwrap();
        assert_eq!(half.apply(&s(-3.0)).unwrap().x(), 0.5);

        let one = krasnoselskii_average(&t, 1.0).unwrap();
        for v in [-7.5, -1.0, 0.0, 0.3, 12.0] {
            assert_eq!(one.apply(&s(v)).unwrap(), t.apply(&s(v)).unwrap());
        }

        let e2 = SpaceDescriptor::rn_lp(LpExponent::Two, 2).unwrap();
        let tr = MapDescriptor::translation(&e2, vec![1.0, -3.0]).unwrap();
        let avg = krasnoselskii_average(&tr, 0.5).unwrap();
        let half_tr = MapDescriptor::translation(&e2, vec![0.5, -1.5]).unwrap();
        for p in [[0.0, 0.0], [2.0, -1.0], [-4.25, 8.5]] {
            let p = Point::new(p.to_vec()).unwrap();
            assert_eq!(avg.apply(&p).unwrap(), half_tr.apply(&p).unwrap());
        }
    }

    #[test]
    fn piecewise_linear_eval_and_continuity() {
        let pl = PiecewiseLinear1D::from_knots(&[0.0, 1.0], &[1.0, 1.5], -1.0, 1.0).unwrap();
        assert_eq!(pl.eval(-2.0), 3.0);
        assert_eq!(pl.eval(0.5), 1.25);
        assert_eq!(pl.eval(3.0), 3.5);
        assert!(PiecewiseLinear1D::new(vec![0.0], vec![1.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(PiecewiseLinear1D::new(vec![1.0, 0.0], vec![0.0; 3], vec![0.0; 3]).is_err());
    }

    #[test]
    fn piecewise_linear_rejects_non_lipschitz_segments() {
        let pl = PiecewiseLinear1D::from_knots(&[0.0], &[0.0], -1.0, 0.5).unwrap();
        assert!(MapDescriptor::piecewise_linear(&line(), pl.clone()).is_ok());
        // asym_r(1,2) admits slopes in [-1/2, 1]
        let asym = SpaceDescriptor::asym_r(1.0, 2.0).unwrap();
        assert!(MapDescriptor::piecewise_linear(&asym, pl).is_err());
        let steep = PiecewiseLinear1D::from_knots(&[0.0], &[0.0], 1.01, 0.0).unwrap();
        assert!(MapDescriptor::piecewise_linear(&line(), steep).is_err());
    }

    #[test]
    fn virtual_pair_examples() {
        let line = line();
        let vp = VirtualPair::new(s(0.0), s(1.0), s(0.5), s(1.5)).unwrap();
        assert_eq!(line.delta(&vp.tx, &vp.ty).unwrap(), 1.0);

        let id = VirtualPair::new(s(2.0), s(-1.0), s(2.0), s(-1.0)).unwrap();
        assert_eq!(line.delta(&id.tx, &id.ty).unwrap(), line.delta(&id.x, &id.y).unwrap());

        let norm = AsymNorm1D::new(1.0, 2.0).unwrap();
        let cfg = VirtualPair::nonfirm_configuration(&norm, 0.0, 1.0).unwrap();
        assert_eq!(cfg.tx, s(1.0));
        assert_eq!(cfg.ty, s(-1.0));
        assert!(VirtualPair::new(s(0.0), Point::new(vec![0.0, 1.0]).unwrap(), s(0.0), s(0.0)).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let t = MapDescriptor::scaling(&line(), 1e300).unwrap();
        assert!(t.apply(&s(1e10)).is_err());
    }
}
