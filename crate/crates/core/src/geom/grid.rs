use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::rng::RngStream;

/// Finite set of unit directions used to discretize suprema and infima over
/// the sphere.
///
/// Lattice grids carry a covering radius `delta`: every unit vector lies
/// within Euclidean distance `delta` of some grid direction. Random grids
/// carry none.
#[derive(Clone, Debug)]
pub struct DirectionGrid {
    dim: usize,
    dirs: Vec<f64>,
    covering: Option<f64>,
}

impl DirectionGrid {
    /// Deterministic lattice for `n <= 3`.
    ///
    /// * `n = 1`: `{+1, -1}`.
    /// * `n = 2`: `resolution` equally spaced angles.
    /// * `n = 3`: cube-sphere lattice, a `resolution x resolution` grid on
    ///   each cube face projected radially.
    pub fn lattice(n: usize, resolution: usize) -> Result<Self> {
        match n {
            1 => Ok(Self { dim: 1, dirs: vec![1.0, -1.0], covering: Some(0.0) }),
            2 => {
                if resolution < 3 {
                    return Err(invalid("planar lattice needs at least 3 directions"));
                }
                let mut dirs = Vec::with_capacity(2 * resolution);
                for k in 0..resolution {
                    let phi = std::f64::consts::TAU * k as f64 / resolution as f64;
                    dirs.push(phi.cos());
                    dirs.push(phi.sin());
                }
                let delta = 2.0 * (std::f64::consts::PI / (2.0 * resolution as f64)).sin();
                Ok(Self { dim: 2, dirs, covering: Some(delta) })
            }
            3 => {
                if resolution < 2 {
                    return Err(invalid("cube-sphere lattice needs resolution >= 2"));
                }
                let k = resolution;
                let step = 2.0 / (k - 1) as f64;
                let mut dirs = Vec::with_capacity(6 * k * k * 3);
                for axis in 0..3 {
                    for sign in [1.0, -1.0] {
                        for i in 0..k {
                            for j in 0..k {
                                let a = -1.0 + step * i as f64;
                                let b = -1.0 + step * j as f64;
                                let mut p = [0.0; 3];
                                p[axis] = sign;
                                p[(axis + 1) % 3] = a;
                                p[(axis + 2) % 3] = b;
                                let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                                dirs.extend(p.iter().map(|c| c / r));
                            }
                        }
                    }
                }
                // face cell half-diagonal; radial projection is 1-Lipschitz outside the unit ball
                let delta = std::f64::consts::SQRT_2 / (k - 1) as f64;
                Ok(Self { dim: 3, dirs, covering: Some(delta) })
            }
            _ => Err(invalid(format!("no deterministic lattice in dimension {n}"))),
        }
    }

    /// `count` independent uniform directions on the sphere.
    pub fn random(n: usize, count: usize, stream: RngStream) -> Result<Self> {
        if n == 0 || count == 0 {
            return Err(invalid("random grid needs n >= 1 and count >= 1"));
        }
        let mut rng = stream.rng();
        let mut dirs = Vec::with_capacity(n * count);
        let mut v = vec![0.0; n];
        for _ in 0..count {
            loop {
                for c in v.iter_mut() {
                    *c = rng.sample(StandardNormal);
                }
                let r = super::norm(&v);
                if r > 1e-300 {
                    dirs.extend(v.iter().map(|c| c / r));
                    break;
                }
            }
        }
        Ok(Self { dim: n, dirs, covering: None })
    }

    /// Lattice when available, otherwise a fixed-seed random grid.
    pub fn default_for(n: usize) -> Result<Self> {
        match n {
            1 => Self::lattice(1, 0),
            2 => Self::lattice(2, 4096),
            3 => Self::lattice(3, 48),
            _ => Self::random(n, 20_000, RngStream::new(0x6772_6964, n as u64)),
        }
    }

    pub fn from_directions(n: usize, directions: &[Vec<f64>]) -> Result<Self> {
        if directions.is_empty() {
            return Err(invalid("direction grid must be nonempty"));
        }
        let mut dirs = Vec::with_capacity(n * directions.len());
        for d in directions {
            crate::error::check_dim(n, d.len())?;
            let r = super::norm(d);
            if (r - 1.0).abs() > 1e-12 {
                return Err(invalid("grid directions must be unit vectors"));
            }
            dirs.extend_from_slice(d);
        }
        Ok(Self { dim: n, dirs, covering: None })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.dirs.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn covering(&self) -> Option<f64> {
        self.covering
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.dirs.chunks_exact(self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattices_are_unit() {
        for (n, res) in [(1, 0), (2, 100), (3, 9)] {
            let g = DirectionGrid::lattice(n, res).unwrap();
            assert!(!g.is_empty());
            for d in g.iter() {
                assert!((super::super::norm(d) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cube_sphere_covering_holds_on_probes() {
        let g = DirectionGrid::lattice(3, 7).unwrap();
        let delta = g.covering().unwrap();
        let probes = DirectionGrid::random(3, 2000, RngStream::new(1, 2)).unwrap();
        for p in probes.iter() {
            let best = g
                .iter()
                .map(|d| {
                    let dx: f64 = d.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
                    dx.sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            assert!(best <= delta, "{best} > {delta}");
        }
    }

    #[test]
    fn random_grid_is_seeded() {
        let a = DirectionGrid::random(4, 10, RngStream::new(3, 0)).unwrap();
        let b = DirectionGrid::random(4, 10, RngStream::new(3, 0)).unwrap();
        assert_eq!(a.dirs, b.dirs);
        assert!(a.covering().is_none());
    }
}
