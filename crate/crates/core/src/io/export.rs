use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::imaging::{DeflationTerm, FieldEvaluator, ImagingSpec, SamplingGrid, ScalarField};
use crate::{Error, Result};

const AXES: [&str; 3] = ["x", "y", "z"];

/// An axis-aligned plane such as `z=0.5`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    /// 0, 1 or 2 for x, y, z.
    pub axis: usize,
    pub value: f64,
}

impl FromStr for Plane {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("plane must look like `z=0.5`, got `{s}`"));
        let (a, v) = s.split_once('=').ok_or_else(bad)?;
        let axis = AXES.iter().position(|n| *n == a.trim().to_ascii_lowercase()).ok_or_else(bad)?;
        let value = v.trim().parse::<f64>().map_err(|_| bad())?;
        if !value.is_finite() {
            return Err(bad());
        }
        Ok(Plane { axis, value })
    }
}

/// Field values on one lattice plane. `values[iu + nu * iv]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneSlice {
    pub plane: Plane,
    /// In-plane axes, ascending.
    pub axes: [usize; 2],
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub values: Vec<f64>,
}

impl PlaneSlice {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// In-plane coordinates of the largest value (first on ties).
    pub fn argmax(&self) -> (f64, f64) {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        (self.u[best % self.u.len()], self.v[best / self.u.len()])
    }

    pub fn normalized(&self) -> PlaneSlice {
        let m = self.max();
        let mut out = self.clone();
        if m > 0.0 {
            out.values.iter_mut().for_each(|v| *v /= m);
        }
        out
    }
}

/// Flat grid indices of the lattice plane nearest to `plane`, in-plane
/// first axis fastest.
pub fn plane_indices(grid: &SamplingGrid, plane: &Plane) -> Result<(Vec<usize>, usize)> {
    let (lo, hi) = (grid.min()[plane.axis], grid.max()[plane.axis]);
    let h = grid.step()[plane.axis];
    if plane.value < lo - 0.5 * h || plane.value > hi + 0.5 * h {
        return Err(Error::Argument(format!(
            "plane {}={} does not meet the grid box [{lo}, {hi}]",
            AXES[plane.axis], plane.value
        )));
    }
    let mut probe = grid.min();
    probe[plane.axis] = plane.value;
    let k = grid.nearest(&probe)[plane.axis];
    let [a, b] = in_plane(plane.axis);
    let dims = grid.dims();
    let mut out = Vec::with_capacity(dims[a] * dims[b]);
    for j in 0..dims[b] {
        for i in 0..dims[a] {
            let mut ijk = [0; 3];
            ijk[plane.axis] = k;
            ijk[a] = i;
            ijk[b] = j;
            out.push(grid.flatten(ijk));
        }
    }
    Ok((out, k))
}

fn in_plane(axis: usize) -> [usize; 2] {
    match axis {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

/// Evaluates the field on one plane only.
pub fn plane_field(
    ev: &FieldEvaluator,
    spec: &ImagingSpec,
    terms: &[DeflationTerm],
    plane: &Plane,
) -> Result<PlaneSlice> {
    let grid = ev.grid();
    let (idx, k) = plane_indices(grid, plane)?;
    let values = ev.values(&idx, spec, terms)?;
    slice_from(grid, plane, k, values)
}

/// Extracts a plane from a full field.
pub fn slice_field(field: &ScalarField, plane: &Plane) -> Result<PlaneSlice> {
    let (idx, k) = plane_indices(&field.grid, plane)?;
    let values = idx.iter().map(|&i| field.values[i]).collect();
    slice_from(&field.grid, plane, k, values)
}

fn slice_from(grid: &SamplingGrid, plane: &Plane, k: usize, values: Vec<f64>) -> Result<PlaneSlice> {
    let axes = in_plane(plane.axis);
    let dims = grid.dims();
    Ok(PlaneSlice {
        plane: Plane {
            axis: plane.axis,
            value: grid.coord(plane.axis, k),
        },
        axes,
        u: (0..dims[axes[0]]).map(|i| grid.coord(axes[0], i)).collect(),
        v: (0..dims[axes[1]]).map(|i| grid.coord(axes[1], i)).collect(),
        values,
    })
}

/// CSV with one row per plane point: two in-plane coordinates and the value.
pub fn write_plane_csv(slice: &PlaneSlice, path: &Path) -> Result<()> {
    let mut s = format!("{},{},value\n", AXES[slice.axes[0]], AXES[slice.axes[1]]);
    let nu = slice.u.len();
    for (i, val) in slice.values.iter().enumerate() {
        let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", slice.u[i % nu], slice.v[i / nu], val);
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Greyscale heatmap, larger values brighter, first in-plane axis to the
/// right and second axis up.
#[cfg(feature = "png")]
pub fn write_plane_png(slice: &PlaneSlice, path: &Path) -> Result<()> {
    let (nu, nv) = (slice.u.len() as u32, slice.v.len() as u32);
    let m = slice.max();
    let img = image::GrayImage::from_fn(nu, nv, |x, y| {
        let v = slice.values[(x + nu * (nv - 1 - y)) as usize];
        let g = if m > 0.0 { (255.0 * v / m).round() as u8 } else { 0 };
        image::Luma([g])
    });
    img.save(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Legacy-VTK structured points, ASCII, one scalar per grid point.
pub fn write_vtk(field: &ScalarField, path: &Path, normalize: bool) -> Result<()> {
    let f = if normalize { field.normalized() } else { field.clone() };
    let g = &f.grid;
    let [nx, ny, nz] = g.dims();
    let (o, h) = (g.min(), g.step());
    let mut s = String::with_capacity(f.values.len() * 24 + 256);
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{}", f.label.replace('\n', " "));
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET STRUCTURED_POINTS");
    let _ = writeln!(s, "DIMENSIONS {nx} {ny} {nz}");
    let _ = writeln!(s, "ORIGIN {:.16e} {:.16e} {:.16e}", o.x, o.y, o.z);
    let _ = writeln!(s, "SPACING {:.16e} {:.16e} {:.16e}", h.x, h.y, h.z);
    let _ = writeln!(s, "POINT_DATA {}", f.values.len());
    let _ = writeln!(s, "SCALARS field double 1");
    let _ = writeln!(s, "LOOKUP_TABLE default");
    for v in &f.values {
        let _ = writeln!(s, "{v:.16e}");
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Dimensions and values of a file written by [`write_vtk`].
pub fn read_vtk(path: &Path) -> Result<([usize; 3], Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let bad = |m: &str| Error::Format(format!("{}: {m}", path.display()));
    if !lines.next().is_some_and(|l| l.starts_with("# vtk DataFile")) {
        return Err(bad("missing VTK header"));
    }
    let mut dims = None;
    let mut count = None;
    for l in lines.by_ref() {
        if let Some(d) = l.strip_prefix("DIMENSIONS ") {
            let v: Vec<usize> = d.split_whitespace().filter_map(|x| x.parse().ok()).collect();
            dims = (v.len() == 3).then(|| [v[0], v[1], v[2]]);
        } else if let Some(n) = l.strip_prefix("POINT_DATA ") {
            count = n.trim().parse::<usize>().ok();
        } else if l.starts_with("LOOKUP_TABLE") {
            break;
        }
    }
    let dims = dims.ok_or_else(|| bad("no DIMENSIONS"))?;
    let count = count.ok_or_else(|| bad("no POINT_DATA"))?;
    let values: Vec<f64> = lines
        .flat_map(str::split_whitespace)
        .map(|x| x.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| bad(&e.to_string()))?;
    if count != dims.iter().product::<usize>() || values.len() != count {
        return Err(bad("value count does not match dimensions"));
    }
    Ok((dims, values))
}
