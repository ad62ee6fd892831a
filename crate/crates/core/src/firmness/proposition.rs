use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mappings::VirtualPair;
use crate::metric::SpaceDescriptor;

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    /// Position in the scanned sample.
    pub index: usize,
    pub pair: VirtualPair,
    pub z: f64,
    /// `||Tx - y|| / ||y - x||`.
    pub tx_gap: f64,
    /// `||Ty - z_xy|| / ||y - x||`.
    pub ty_gap: f64,
}

/// First sampled pair of distinct points within relative distance `epsilon`
/// of the non-firm configuration `Tx = y`, `Ty = z_xy`, on a 1-D (asymmetric) norm.
pub fn proposition_witness_scan(space: &SpaceDescriptor, quads: &[VirtualPair], epsilon: f64) -> Result<Option<Witness>> {
    let norm = space
        .as_asym_1d()
        .ok_or_else(|| Error::usage("the witness scan needs a 1-D asymmetric norm host"))?;
    if !(epsilon > 0.0) {
        return Err(Error::usage(format!("epsilon must be > 0, got {epsilon}")));
    }
    let hit = quads.par_iter().enumerate().find_map_first(|(index, q)| {
        let (x, y) = (q.x.x(), q.y.x());
        if x == y {
            return None;
        }
        let z = norm.z_of_pair(x, y).ok()?;
        let d = norm.norm(y - x);
        let tx_gap = norm.norm(q.tx.x() - y) / d;
        let ty_gap = norm.norm(q.ty.x() - z) / d;
        (tx_gap < epsilon && ty_gap < epsilon).then(|| Witness { index, pair: q.clone(), z, tx_gap, ty_gap })
    });
    Ok(hit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mappings::{images_of, MapDescriptor, PiecewiseLinear1D};
    use crate::sampler::{Region, Sampler};

    fn pairs(lo: f64, hi: f64) -> Vec<(crate::Point, crate::Point)> {
        Sampler::uniform(Region::interval(lo, hi).unwrap(), 10_000, 4).unwrap().pairs()
    }

    #[test]
    fn exact_configuration_is_a_witness_at_every_epsilon() {
        let space = SpaceDescriptor::asym_r(2.0, 0.5).unwrap();
        let vp = VirtualPair::nonfirm_configuration(&space.as_asym_1d().unwrap(), 1.0, -3.0).unwrap();
        for eps in [1.0, 1e-3, 1e-12] {
            let w = proposition_witness_scan(&space, std::slice::from_ref(&vp), eps).unwrap().unwrap();
            assert_eq!((w.index, w.tx_gap, w.ty_gap), (0, 0.0, 0.0));
        }
    }

    #[test]
    fn reflect_exp_has_no_witness() {
        let line = SpaceDescriptor::real_line_abs();
        let t = MapDescriptor::reflect_exp(&line).unwrap();
        let qs = images_of(&t, &pairs(-10.0, 10.0)).unwrap();
        assert!(proposition_witness_scan(&line, &qs, 1e-3).unwrap().is_none());
    }

    #[test]
    fn fixed_point_free_piecewise_map_has_no_witness() {
        // Slopes in [-1/2, 1] on asym_r(1,2); T x - x >= 0.1 everywhere.
        let space = SpaceDescriptor::asym_r(1.0, 2.0).unwrap();
        let pl = PiecewiseLinear1D::from_knots(&[-2.0, 0.0, 3.0], &[1.0, 0.5, 3.5], -0.25, 1.0).unwrap();
        let t = MapDescriptor::piecewise_linear(&space, pl).unwrap();
        let qs = images_of(&t, &pairs(-10.0, 10.0)).unwrap();
        assert!(qs.iter().all(|q| q.tx.x() - q.x.x() >= 0.1));
        assert!(proposition_witness_scan(&space, &qs, 1e-3).unwrap().is_none());
    }

    #[test]
    fn first_witness_in_sample_order() {
        let space = SpaceDescriptor::real_line_abs();
        let norm = space.as_asym_1d().unwrap();
        let far = VirtualPair::new(crate::Point::scalar(0.0), crate::Point::scalar(1.0), crate::Point::scalar(5.0), crate::Point::scalar(5.0)).unwrap();
        let a = VirtualPair::nonfirm_configuration(&norm, 0.0, 1.0).unwrap();
        let b = VirtualPair::nonfirm_configuration(&norm, 2.0, 4.0).unwrap();
        let w = proposition_witness_scan(&space, &[far, b, a], 1e-6).unwrap().unwrap();
        assert_eq!(w.index, 1);
        assert!(proposition_witness_scan(&SpaceDescriptor::rn_lp(crate::LpExponent::Two, 2).unwrap(), &[], 0.1).is_err());
    }
}
