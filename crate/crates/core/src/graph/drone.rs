//! Two-cluster random geometric graphs modelling a pair of drone swarms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};
use crate::scalar::Scalar;

/// Parameters of the two-barycenter drone scenario.
///
/// `ceil(n/2)` nodes are drawn uniformly in the unit disc around `(0, 0)` and
/// the rest in the unit disc around `(d, 0)`; two nodes are linked when their
/// distance is at most `radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DroneParams<T> {
    pub n: usize,
    pub d: T,
    pub radius: T,
    pub seed: u64,
}

impl<T: Scalar> DroneParams<T> {
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.n < 2 {
            return Err(GraphError::Parameter(format!("drone scenario needs n >= 2, got {}", self.n)));
        }
        if self.radius.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
            return Err(GraphError::Parameter(format!("radius must be positive, got {}", self.radius)));
        }
        if !matches!(self.d.partial_cmp(&T::zero()), Some(std::cmp::Ordering::Greater | std::cmp::Ordering::Equal)) {
            return Err(GraphError::Parameter(format!("barycenter distance must be >= 0, got {}", self.d)));
        }
        Ok(())
    }

    /// Sampled node positions, first cluster first.
    pub fn positions(&self) -> Result<Vec<[T; 2]>, GraphError> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let first = self.n.div_ceil(2);
        Ok((0..self.n)
            .map(|i| {
                let cx = if i < first { T::zero() } else { self.d };
                let [x, y] = unit_disc_point::<T, _>(&mut rng);
                [cx + x, y]
            })
            .collect())
    }
}

fn unit_disc_point<T: Scalar, R: Rng>(rng: &mut R) -> [T; 2] {
    let r = T::of(rng.gen::<f64>()).sqrt();
    let theta = T::of(rng.gen::<f64>() * std::f64::consts::TAU);
    [r * theta.cos(), r * theta.sin()]
}

/// Unit-disk graph over [`DroneParams::positions`].
pub fn gen_drone<T: Scalar>(params: &DroneParams<T>) -> Result<Graph, GraphError> {
    let pos = params.positions()?;
    let r2 = params.radius * params.radius;
    let mut g = Graph::empty(params.n);
    for u in 0..pos.len() {
        for v in u + 1..pos.len() {
            let (dx, dy) = (pos[u][0] - pos[v][0], pos[u][1] - pos[v][1]);
            if dx * dx + dy * dy <= r2 {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}
