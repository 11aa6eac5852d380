use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::forward::{CauchyData, Provenance, SurfaceSpec};
use crate::kernels::WaveContext;
use crate::{ComplexVec3, Error, RealVec3, Result};

pub const DATA_FORMAT: &str = "emsource-cauchy-data/1";

/// Column names of the sample table; `C = curl E × ν`.
pub const CSV_HEADER: [&str; 22] = [
    "idx", "phi", "theta", "x", "y", "z", "nux", "nuy", "nuz", "w", "ReE1", "ImE1", "ReE2", "ImE2", "ReE3", "ImE3",
    "ReC1", "ImC1", "ReC2", "ImC2", "ReC3", "ImC3",
];

/// The JSON document written next to the sample table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetMetadata {
    pub format: String,
    pub k: WaveContext,
    pub surface: SurfaceSpec,
    pub points: usize,
    pub provenance: Provenance,
    /// File name of the table, relative to the metadata file.
    pub csv: String,
    pub csv_sha256: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetFiles {
    pub metadata: PathBuf,
    pub csv: PathBuf,
    pub sha256: String,
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Sample table as text, 17 significant digits per value.
pub fn cauchy_csv(data: &CauchyData) -> String {
    let s = &data.surface;
    let mut out = String::with_capacity(data.len() * 22 * 25);
    out.push_str(&CSV_HEADER.join(","));
    out.push('\n');
    for i in 0..data.len() {
        let mut row = vec![
            i.to_string(),
            fmt(s.angles[i].0),
            fmt(s.angles[i].1),
        ];
        row.extend(s.points[i].iter().map(|v| fmt(*v)));
        row.extend(s.normals[i].iter().map(|v| fmt(*v)));
        row.push(fmt(s.weights[i]));
        for v in [&data.e[i], &data.curl_e_cross_nu[i]] {
            for c in v.iter() {
                row.push(fmt(c.re));
                row.push(fmt(c.im));
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `<dir>/<name>.json` and `<dir>/<name>.csv`.
pub fn write_dataset(data: &CauchyData, dir: &Path, name: &str) -> Result<DatasetFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_name = format!("{name}.csv");
    let csv_path = dir.join(&csv_name);
    let text = cauchy_csv(data);
    let sha256 = sha256_hex(text.as_bytes());
    std::fs::write(&csv_path, &text).map_err(|e| Error::io(&csv_path, e))?;
    let meta = DatasetMetadata {
        format: DATA_FORMAT.into(),
        k: data.ctx,
        surface: data.surface.spec(),
        points: data.len(),
        provenance: data.provenance.clone(),
        csv: csv_name,
        csv_sha256: sha256.clone(),
    };
    let meta_path = dir.join(format!("{name}.json"));
    write_json(&meta_path, &meta)?;
    Ok(DatasetFiles {
        metadata: meta_path,
        csv: csv_path,
        sha256,
    })
}

/// Writes any serialisable value as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Format(e.to_string()))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Reads a dataset from its metadata file, checking the table hash and that
/// the stored geometry matches the declared surface.
pub fn read_dataset(metadata: &Path) -> Result<CauchyData> {
    let text = std::fs::read_to_string(metadata).map_err(|e| Error::io(metadata, e))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let meta: DatasetMetadata = serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Format(format!("{}: {} at `{}`", metadata.display(), e.inner(), e.path())))?;
    if meta.format != DATA_FORMAT {
        return Err(Error::Format(format!("unsupported dataset format `{}`", meta.format)));
    }
    let csv_path = metadata.parent().unwrap_or(Path::new(".")).join(&meta.csv);
    let bytes = std::fs::read(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let sha = sha256_hex(&bytes);
    if sha != meta.csv_sha256 {
        return Err(Error::Format(format!(
            "{}: sha256 {sha} does not match metadata {}",
            csv_path.display(),
            meta.csv_sha256
        )));
    }
    let mut surface = meta.surface.build()?;
    if surface.len() != meta.points {
        return Err(Error::Format(format!(
            "metadata declares {} points but the surface has {}",
            meta.points,
            surface.len()
        )));
    }
    let mut rdr = csv::Reader::from_reader(bytes.as_slice());
    let header = rdr.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Format(format!("unexpected CSV header `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let n = surface.len();
    let mut e = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    let tol = 1e-9 * surface.radius.max(1.0);
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(format!("row {row}: {e}")))?;
        if row >= n {
            return Err(Error::Format(format!("more than {n} rows")));
        }
        let v: Vec<f64> = rec
            .iter()
            .skip(1)
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("row {row}: {e}")))?;
        if v.len() != 21 || rec[0].trim() != row.to_string() {
            return Err(Error::Format(format!("row {row}: malformed")));
        }
        let p = RealVec3::new(v[2], v[3], v[4]);
        if (p - surface.points[row]).norm() > tol {
            return Err(Error::Format(format!("row {row}: point does not lie on the declared surface")));
        }
        surface.angles[row] = (v[0], v[1]);
        surface.points[row] = p;
        surface.normals[row] = RealVec3::new(v[5], v[6], v[7]);
        surface.weights[row] = v[8];
        let cv = |o: usize| ComplexVec3::from_fn(|i, _| Complex64::new(v[o + 2 * i], v[o + 2 * i + 1]));
        e.push(cv(9));
        c.push(cv(15));
    }
    if e.len() != n {
        return Err(Error::Format(format!("expected {n} rows, found {}", e.len())));
    }
    CauchyData::new(surface, meta.k, e, c, meta.provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{add_noise, build_sphere_surface, synthesize_point_source_data, PointSource, SourceSet};

    fn data() -> CauchyData {
        let src = PointSource::new(
            RealVec3::new(0.1, -0.2, 0.3),
            ComplexVec3::new(Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5), Complex64::new(0.0, 1.0)),
        )
        .unwrap();
        let surface = build_sphere_surface(RealVec3::zeros(), 3.0, 8, 12).unwrap();
        let d = synthesize_point_source_data(&SourceSet::new(vec![src]), &surface, WaveContext::new(7.0).unwrap())
            .unwrap();
        add_noise(&d, 0.1, 0.2, 3).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let d = data();
        let dir = tempfile::tempdir().unwrap();
        let files = write_dataset(&d, dir.path(), "t").unwrap();
        let back = read_dataset(&files.metadata).unwrap();
        assert_eq!(back, d);
        let text = std::fs::read_to_string(&files.csv).unwrap();
        assert!(text.starts_with(
            "idx,phi,theta,x,y,z,nux,nuy,nuz,w,ReE1,ImE1,ReE2,ImE2,ReE3,ImE3,ReC1,ImC1,ReC2,ImC2,ReC3,ImC3\n"
        ));
        assert_eq!(text.lines().count(), d.len() + 1);
    }

    #[test]
    fn tampering_is_detected() {
        let d = data();
        let dir = tempfile::tempdir().unwrap();
        let files = write_dataset(&d, dir.path(), "t").unwrap();
        let text = std::fs::read_to_string(&files.csv).unwrap();
        std::fs::write(&files.csv, text.replacen("e0,", "e1,", 1)).unwrap();
        assert!(matches!(read_dataset(&files.metadata), Err(Error::Format(_))));
    }
}
