use num_traits::{One, Signed, Zero};

use crate::model::{is_in_polytope, RingInstance, WeightedSsufNetwork};
use crate::rational::Rational;

/// A polytope given by native coordinates with simple bounds (plus, for
/// flows, conservation equalities), mapped affinely to the space where
/// costs and error bodies live.
///
/// For flows the two spaces coincide. For ring loading the native
/// coordinates are the splits and the image is the edge-load vector.
/// Affine combinations commute with the map, so points built from native
/// coordinates can be checked in either space.
pub trait Relaxation {
    fn native_dim(&self) -> usize;

    fn native_lower(&self, i: usize) -> Rational;

    fn native_upper(&self, i: usize) -> Option<Rational>;

    fn contains(&self, point: &[Rational]) -> bool;

    fn image(&self, point: &[Rational]) -> Vec<Rational>;

    fn costs(&self) -> Vec<Rational>;

    fn cost(&self, point: &[Rational]) -> Rational {
        let image = self.image(point);
        self.costs().iter().zip(&image).map(|(c, v)| c * v).sum()
    }
}

pub struct SsufRelaxation<'a>(pub &'a WeightedSsufNetwork);

impl Relaxation for SsufRelaxation<'_> {
    fn native_dim(&self) -> usize {
        self.0.arc_count()
    }

    fn native_lower(&self, _: usize) -> Rational {
        Rational::zero()
    }

    fn native_upper(&self, _: usize) -> Option<Rational> {
        None
    }

    fn contains(&self, point: &[Rational]) -> bool {
        is_in_polytope(self.0, point)
    }

    fn image(&self, point: &[Rational]) -> Vec<Rational> {
        point.to_vec()
    }

    fn costs(&self) -> Vec<Rational> {
        self.0.costs()
    }
}

pub struct RingRelaxation<'a>(pub &'a RingInstance);

impl Relaxation for RingRelaxation<'_> {
    fn native_dim(&self) -> usize {
        self.0.commodities().len()
    }

    fn native_lower(&self, _: usize) -> Rational {
        Rational::zero()
    }

    fn native_upper(&self, _: usize) -> Option<Rational> {
        Some(Rational::one())
    }

    fn contains(&self, point: &[Rational]) -> bool {
        point.len() == self.native_dim() && point.iter().all(|s| !s.is_negative() && *s <= Rational::one())
    }

    fn image(&self, point: &[Rational]) -> Vec<Rational> {
        self.0.split_loads(point).expect("dimension checked by callers")
    }

    fn costs(&self) -> Vec<Rational> {
        self.0.costs()
    }
}
