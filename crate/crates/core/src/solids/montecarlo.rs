//! Hit-or-miss volume estimation over a solid's bounding box.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::math::Vec3;
use crate::real::Real;

use super::{Solid, SolidError};

pub const MIN_MC_SAMPLES: usize = 10_000;

/// Samples per independently seeded block. Blocks are fixed by sample index,
/// so the estimate does not depend on the number of worker threads.
const BLOCK: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate<T> {
    pub volume: T,
    /// One standard error of `volume`.
    pub std_error: T,
    pub hits: usize,
    pub samples: usize,
}

impl<T: Real> Solid<T> {
    /// Estimates the volume from `n_samples` uniform points in the bounding box.
    /// Surface points count as hits. A fixed seed gives bit-identical results.
    pub fn mc_volume(&self, n_samples: usize, seed: u64) -> Result<McEstimate<T>, SolidError> {
        if n_samples < MIN_MC_SAMPLES {
            return Err(SolidError::TooFewSamples { requested: n_samples, min: MIN_MC_SAMPLES });
        }
        let bbox = self.bounding_box();
        let box_volume = bbox.volume();
        if bbox.is_empty() || !(box_volume > T::zero()) {
            return Err(SolidError::EmptyBoundingBox(self.name().to_string()));
        }
        let size = bbox.size();
        let blocks = n_samples.div_ceil(BLOCK);
        let hits: usize = (0..blocks)
            .into_par_iter()
            .map(|block| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(block as u64);
                let count = BLOCK.min(n_samples - block * BLOCK);
                (0..count)
                    .filter(|_| {
                        let u = Vec3::new(T::lit(rng.gen::<f64>()), T::lit(rng.gen::<f64>()), T::lit(rng.gen::<f64>()));
                        self.contains(bbox.min + u.component_mul(size)).is_inside_or_surface()
                    })
                    .count()
            })
            .sum();
        let n = T::lit(n_samples as f64);
        let p = T::lit(hits as f64) / n;
        Ok(McEstimate {
            volume: box_volume * p,
            std_error: box_volume * (p * (T::one() - p) / n).sqrt(),
            hits,
            samples: n_samples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_box_is_exact() {
        let b = Solid::new_box("b", 1.0, 1.0, 1.0).unwrap();
        let e = b.mc_volume(1_000_000, 1).unwrap();
        assert_eq!(e.volume, 8.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn sphere_within_three_sigma() {
        let s = Solid::new_ball("s", 1.0).unwrap();
        let e = s.mc_volume(1_000_000, 1).unwrap();
        let exact = 4.0 / 3.0 * std::f64::consts::PI;
        assert!((e.volume - exact).abs() <= 3.0 * e.std_error, "{e:?}");
        assert!((e.std_error - 0.0040).abs() < 0.001);
    }

    #[test]
    fn seeded_results_repeat_and_differ_across_seeds() {
        let s = Solid::new_ball("s", 1.0).unwrap();
        let a = s.mc_volume(200_000, 7).unwrap();
        let b = s.mc_volume(200_000, 7).unwrap();
        let c = s.mc_volume(200_000, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.hits, c.hits);
    }

    #[test]
    fn thread_count_does_not_change_the_estimate() {
        let s = Solid::new_ball("s", 1.0).unwrap();
        let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
        let one = pool(1).install(|| s.mc_volume(300_000, 3).unwrap());
        let four = pool(4).install(|| s.mc_volume(300_000, 3).unwrap());
        assert_eq!(one, four);
    }

    #[test]
    fn too_few_samples() {
        let s = Solid::new_ball("s", 1.0).unwrap();
        assert!(matches!(s.mc_volume(9_999, 0), Err(SolidError::TooFewSamples { .. })));
    }
}
