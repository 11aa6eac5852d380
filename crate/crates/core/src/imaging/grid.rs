use serde::{Deserialize, Serialize};

use crate::{Error, RealVec3, Result};

/// A rectilinear lattice of sampling points, endpoints included.
///
/// Flat indices run x-fastest: `ix + nx * (iy + ny * iz)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct SamplingGrid {
    min: RealVec3,
    max: RealVec3,
    n: [usize; 3],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridRepr {
    min: [f64; 3],
    max: [f64; 3],
    n: [usize; 3],
}

impl TryFrom<GridRepr> for SamplingGrid {
    type Error = Error;
    fn try_from(r: GridRepr) -> Result<Self> {
        SamplingGrid::new(r.min.into(), r.max.into(), r.n)
    }
}

impl From<SamplingGrid> for GridRepr {
    fn from(g: SamplingGrid) -> Self {
        GridRepr {
            min: g.min.into(),
            max: g.max.into(),
            n: g.n,
        }
    }
}

impl SamplingGrid {
    pub fn new(min: RealVec3, max: RealVec3, n: [usize; 3]) -> Result<Self> {
        for a in 0..3 {
            if !(min[a].is_finite() && max[a].is_finite() && min[a] < max[a]) {
                return Err(Error::config("grid.box", format!("min must be below max on axis {a}")));
            }
            if n[a] < 2 {
                return Err(Error::config("grid.n", format!("need at least 2 points on axis {a}")));
            }
        }
        Ok(Self { min, max, n })
    }

    /// The cube `[lo, hi]³` with `n` points per axis.
    pub fn cube(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(RealVec3::repeat(lo), RealVec3::repeat(hi), [n; 3])
    }

    pub fn min(&self) -> RealVec3 {
        self.min
    }

    pub fn max(&self) -> RealVec3 {
        self.max
    }

    pub fn dims(&self) -> [usize; 3] {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step(&self) -> RealVec3 {
        RealVec3::from_fn(|a, _| (self.max[a] - self.min[a]) / (self.n[a] - 1) as f64)
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        // Interpolate from both ends so that the last index lands on max exactly.
        let t = i as f64 / (self.n[axis] - 1) as f64;
        self.min[axis] * (1.0 - t) + self.max[axis] * t
    }

    pub fn point_at(&self, ijk: [usize; 3]) -> RealVec3 {
        RealVec3::new(self.coord(0, ijk[0]), self.coord(1, ijk[1]), self.coord(2, ijk[2]))
    }

    pub fn point(&self, flat: usize) -> RealVec3 {
        self.point_at(self.unflatten(flat))
    }

    pub fn flatten(&self, ijk: [usize; 3]) -> usize {
        ijk[0] + self.n[0] * (ijk[1] + self.n[1] * ijk[2])
    }

    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let ix = flat % self.n[0];
        let rest = flat / self.n[0];
        [ix, rest % self.n[1], rest / self.n[1]]
    }

    /// Nearest lattice index to `p`, clamped to the grid.
    pub fn nearest(&self, p: &RealVec3) -> [usize; 3] {
        let step = self.step();
        std::array::from_fn(|a| {
            let t = ((p[a] - self.min[a]) / step[a]).round();
            t.clamp(0.0, (self.n[a] - 1) as f64) as usize
        })
    }

    pub fn contains(&self, p: &RealVec3) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }

    /// The sub-lattice of every `stride`-th point, keeping both ends when the
    /// size allows. Returns the coarse grid and, per axis, the fine index of
    /// each coarse index.
    pub fn coarsen(&self, stride: usize) -> Result<(SamplingGrid, [Vec<usize>; 3])> {
        if stride == 0 {
            return Err(Error::config("grid.coarse_stride", "must be positive"));
        }
        let picks: [Vec<usize>; 3] = std::array::from_fn(|a| {
            let mut v: Vec<usize> = (0..self.n[a]).step_by(stride).collect();
            if *v.last().unwrap() != self.n[a] - 1 {
                v.push(self.n[a] - 1);
            }
            v
        });
        // The coarse grid is only used for its index structure; its geometry
        // is exact when the stride divides n - 1.
        let coarse = SamplingGrid::new(self.min, self.max, std::array::from_fn(|a| picks[a].len()))?;
        Ok((coarse, picks))
    }

    /// Indices of the 26-neighbourhood of `ijk` that lie on the grid.
    pub fn neighbours(&self, ijk: [usize; 3]) -> impl Iterator<Item = [usize; 3]> + '_ {
        let n = self.n;
        (0..27).filter(|&c| c != 13).filter_map(move |c| {
            let d = [c % 3, (c / 3) % 3, c / 9];
            let mut out = [0usize; 3];
            for a in 0..3 {
                let v = ijk[a] as isize + d[a] as isize - 1;
                if v < 0 || v >= n[a] as isize {
                    return None;
                }
                out[a] = v as usize;
            }
            Some(out)
        })
    }

    /// Flat indices of the box `center ± half` (in index units), clipped.
    pub fn window(&self, center: [usize; 3], half: usize) -> Vec<usize> {
        let lo: [usize; 3] = std::array::from_fn(|a| center[a].saturating_sub(half));
        let hi: [usize; 3] = std::array::from_fn(|a| (center[a] + half).min(self.n[a] - 1));
        let mut out = Vec::new();
        for iz in lo[2]..=hi[2] {
            for iy in lo[1]..=hi[1] {
                for ix in lo[0]..=hi[0] {
                    out.push(self.flatten([ix, iy, iz]));
                }
            }
        }
        out
    }
}
