//! Seeded sampling of points on S³ and in ℝ⁴.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frame::SpherePoint;

/// Default seed recorded in every report that samples points.
pub const DEFAULT_SEED: u64 = 0x5EED_0003;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform point on S³ (rejection from the cube).
    pub fn sphere_point(&mut self) -> SpherePoint {
        loop {
            let v: [f64; 4] = [0; 4].map(|_| self.rng.gen_range(-1.0..1.0));
            let r2: f64 = v.iter().map(|c| c * c).sum();
            if r2 > 1e-4 && r2 <= 1.0 {
                return SpherePoint::new(v).expect("nonzero sample");
            }
        }
    }

    /// Point of ℝ⁴ with uniform direction and radius uniform in `[r_min, r_max]`.
    pub fn shell_point(&mut self, r_min: f64, r_max: f64) -> [f64; 4] {
        let dir = self.sphere_point().coords();
        let r = self.rng.gen_range(r_min..=r_max);
        dir.map(|c| c * r)
    }

    pub fn unit_cube3(&mut self) -> [f64; 3] {
        [0; 3].map(|_| self.rng.gen_range(-1.0..1.0))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }
}
