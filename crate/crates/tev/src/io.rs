//! File formats: the ASCII mesh format and two-column curve CSVs.

use std::fs;
use std::io::Write;
use std::path::Path;

use tev_core::disk::DetCurve;
use tev_core::mesh::Mesh;
use tev_core::tev_fem::SignScan;

use crate::error::{TevError, TevResultOf};

/// Read and validate a mesh file.
pub fn load_mesh(path: &Path) -> TevResultOf<Mesh> {
    let text = fs::read_to_string(path).map_err(|e| TevError::io(path, e))?;
    Ok(Mesh::from_text(&text)?)
}

/// Write `mesh` in the ASCII mesh format.
pub fn save_mesh(mesh: &Mesh, path: &Path) -> TevResultOf<()> {
    fs::write(path, mesh.to_text()).map_err(|e| TevError::io(path, e))
}

/// Write `(x, y)` pairs as CSV with the given column names.
pub fn write_pairs_csv<W: Write>(out: W, names: [&str; 2], xs: &[f64], ys: &[f64]) -> TevResultOf<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(names)?;
    for (x, y) in xs.iter().zip(ys) {
        w.write_record([format_float(*x), format_float(*y)])?;
    }
    w.flush().map_err(|e| TevError::io("<csv>", e))?;
    Ok(())
}

/// `k,d_m` columns.
pub fn write_det_curve<W: Write>(out: W, curve: &DetCurve) -> TevResultOf<()> {
    write_pairs_csv(out, ["k", "d_m"], &curve.k_grid, &curve.values)
}

/// `k,f` columns.
pub fn write_scan<W: Write>(out: W, scan: &SignScan) -> TevResultOf<()> {
    write_pairs_csv(out, ["k", "f"], &scan.k_grid, &scan.f_values)
}

/// Create `path` for writing.
pub fn create(path: &Path) -> TevResultOf<fs::File> {
    fs::File::create(path).map_err(|e| TevError::io(path, e))
}

/// Shortest representation that reads back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use tev_core::mesh::generate;
    use tev_core::{DomainKind, DomainSpec, MaterialParams};

    #[test]
    fn mesh_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sq.mesh");
        let m = generate(&DomainSpec::new(DomainKind::UnitSquare, 0)).unwrap();
        save_mesh(&m, &path).unwrap();
        assert_eq!(load_mesh(&path).unwrap(), m);
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_mesh(Path::new("/nonexistent/x.mesh")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/x.mesh"));
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn curve_csv_has_header_and_rows() {
        let p = MaterialParams::isotropic(0.4, 3.0, 1.0).unwrap();
        let c = DetCurve::sample(0, &p, 1.0, 1.1, 0.05).unwrap();
        let mut buf = Vec::new();
        write_det_curve(&mut buf, &c).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,d_m");
        assert_eq!(lines.len(), c.k_grid.len() + 1);
    }
}
