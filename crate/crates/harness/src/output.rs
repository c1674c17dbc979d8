//! CSV records and plain-text matrix dumps.
//!
//! Floats are written in their shortest round-trip decimal form, so a value
//! read back with any correctly rounded parser is bit-identical to the one
//! written.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use faer::{Mat, MatRef};
use lindsteady_core::C64;

use crate::error::{HarnessError, Result};

/// Shortest decimal string that parses back to exactly `x`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// One solved (or failed) grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub scan: String,
    pub n: usize,
    pub t: f64,
    pub lattice_boundary: String,
    pub gamma: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub beta: f64,
    pub nu: f64,
    pub dissipation_boundary: String,
    pub index_origin: u32,
    pub method: String,
    pub gauge: String,
    pub log_base: String,
    /// `ok`, or `failed: <reason>`.
    pub status: String,
    pub residual: f64,
    pub c_re: f64,
    pub purity: f64,
    pub pr: f64,
    pub min_eig_rho: f64,
    pub steps: usize,
    pub wall_time: f64,
}

pub const CSV_HEADER: [&str; 22] = [
    "scan",
    "n",
    "t",
    "lattice_boundary",
    "gamma",
    "alpha0",
    "alpha1",
    "beta",
    "nu",
    "dissipation_boundary",
    "index_origin",
    "method",
    "gauge",
    "log_base",
    "status",
    "residual",
    "c_re",
    "purity",
    "pr",
    "min_eig_rho",
    "steps",
    "wall_time",
];

impl ResultRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn fields(&self) -> [String; 22] {
        [
            self.scan.clone(),
            self.n.to_string(),
            fmt_f64(self.t),
            self.lattice_boundary.clone(),
            fmt_f64(self.gamma),
            fmt_f64(self.alpha0),
            fmt_f64(self.alpha1),
            fmt_f64(self.beta),
            fmt_f64(self.nu),
            self.dissipation_boundary.clone(),
            self.index_origin.to_string(),
            self.method.clone(),
            self.gauge.clone(),
            self.log_base.clone(),
            self.status.clone(),
            fmt_f64(self.residual),
            fmt_f64(self.c_re),
            fmt_f64(self.purity),
            fmt_f64(self.pr),
            fmt_f64(self.min_eig_rho),
            self.steps.to_string(),
            fmt_f64(self.wall_time),
        ]
    }

    fn from_fields(r: &csv::StringRecord) -> std::result::Result<Self, String> {
        if r.len() != CSV_HEADER.len() {
            return Err(format!("expected {} fields, found {}", CSV_HEADER.len(), r.len()));
        }
        let f = |i: usize| -> std::result::Result<f64, String> {
            r[i].parse().map_err(|e| format!("{}: {e}", CSV_HEADER[i]))
        };
        let u = |i: usize| -> std::result::Result<usize, String> {
            r[i].parse().map_err(|e| format!("{}: {e}", CSV_HEADER[i]))
        };
        Ok(Self {
            scan: r[0].to_string(),
            n: u(1)?,
            t: f(2)?,
            lattice_boundary: r[3].to_string(),
            gamma: f(4)?,
            alpha0: f(5)?,
            alpha1: f(6)?,
            beta: f(7)?,
            nu: f(8)?,
            dissipation_boundary: r[9].to_string(),
            index_origin: u(10)? as u32,
            method: r[11].to_string(),
            gauge: r[12].to_string(),
            log_base: r[13].to_string(),
            status: r[14].to_string(),
            residual: f(15)?,
            c_re: f(16)?,
            purity: f(17)?,
            pr: f(18)?,
            min_eig_rho: f(19)?,
            steps: u(20)?,
            wall_time: f(21)?,
        })
    }
}

pub fn write_records<W: Write>(records: &[ResultRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_csv(records: &[ResultRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_records(records, BufWriter::new(file)).map_err(|e| HarnessError::io(path, e.into()))
}

pub fn read_records_csv(path: &Path) -> Result<Vec<ResultRecord>> {
    let bad = |msg: String| HarnessError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, msg));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| HarnessError::io(path, e.into()))?;
    let header = rdr.headers().map_err(|e| HarnessError::io(path, e.into()))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(bad("unexpected header".into()));
    }
    rdr.records()
        .map(|r| {
            let r = r.map_err(|e| HarnessError::io(path, e.into()))?;
            ResultRecord::from_fields(&r).map_err(bad)
        })
        .collect()
}

/// Writes `N <n> <tag>` and then every entry as `row col real imag`, row-major.
pub fn write_matrix_dump(m: MatRef<'_, C64>, tag: &str, path: &Path) -> Result<()> {
    let io = |e| HarnessError::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(w, "N {} {tag}", m.nrows()).map_err(io)?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            writeln!(w, "{i} {j} {} {}", fmt_f64(z.re), fmt_f64(z.im)).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

pub fn read_matrix_dump(path: &Path) -> Result<(String, Mat<C64>)> {
    let io = |e| HarnessError::io(path, e);
    let bad = |line: usize, msg: &str| {
        HarnessError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("line {line}: {msg}")),
        )
    };
    let mut lines = BufReader::new(File::open(path).map_err(io)?).lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file"))?.map_err(io)?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    let n: usize = match parts.as_slice() {
        ["N", n, _] => n.parse().map_err(|_| bad(1, "bad size"))?,
        _ => return Err(bad(1, "expected `N <n> <basis-tag>`")),
    };
    let tag = parts[2].to_string();
    let mut m = Mat::<C64>::zeros(n, n);
    let mut count = 0;
    for (k, line) in lines.enumerate() {
        let line = line.map_err(io)?;
        let lineno = k + 2;
        let p: Vec<&str> = line.split_whitespace().collect();
        if p.len() != 4 {
            return Err(bad(lineno, "expected `row col real imag`"));
        }
        let i: usize = p[0].parse().map_err(|_| bad(lineno, "bad row"))?;
        let j: usize = p[1].parse().map_err(|_| bad(lineno, "bad column"))?;
        let re: f64 = p[2].parse().map_err(|_| bad(lineno, "bad real part"))?;
        let im: f64 = p[3].parse().map_err(|_| bad(lineno, "bad imaginary part"))?;
        if i >= n || j >= n {
            return Err(bad(lineno, "index out of range"));
        }
        m[(i, j)] = C64::new(re, im);
        count += 1;
    }
    if count != n * n {
        return Err(bad(count + 1, &format!("expected {} entries, found {count}", n * n)));
    }
    Ok((tag, m))
}

/// Writes `N <n> <tag>` and then `index value` per line.
pub fn write_profile_dump(values: &[f64], tag: &str, path: &Path) -> Result<()> {
    let io = |e| HarnessError::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(w, "N {} {tag}", values.len()).map_err(io)?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{i} {}", fmt_f64(*v)).map_err(io)?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> ResultRecord {
        ResultRecord {
            scan: "nu, fast".into(),
            n: 144,
            t: 1.0,
            lattice_boundary: "periodic".into(),
            gamma: 1.0,
            alpha0: 0.0,
            alpha1: 4.0,
            beta: 0.6180339887498949,
            nu: 0.1,
            dissipation_boundary: "open".into(),
            index_origin: 0,
            method: "nullspace".into(),
            gauge: "momentum".into(),
            log_base: "e".into(),
            status: "ok".into(),
            residual: 3.2e-13,
            c_re: 3.0355,
            purity: 0.4445,
            pr: 6.51,
            min_eig_rho: -1.5e-17,
            steps: 1,
            wall_time: 0.25,
        }
    }

    #[test]
    fn shortest_round_trip_format() {
        for x in [0.0, 1.0, -0.5, 0.1, 1.0 / 3.0, 6.02e23, 1e-300, -2.5e-9, f64::MAX, 5e-324] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits(), "{x}");
        }
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(1e-12), "1e-12");
    }

    #[test]
    fn empty_record_list_is_header_only() {
        let mut buf = Vec::new();
        write_records(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let mut failed = record();
        failed.status = "failed: singular, see report".into();
        failed.c_re = f64::NAN;
        write_records_csv(&[record(), failed.clone()], &path).unwrap();
        let back = read_records_csv(&path).unwrap();
        assert_eq!(back[0], record());
        assert_eq!(back[1].status, failed.status);
        assert!(back[1].c_re.is_nan());
    }

    #[test]
    fn identity_dump() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eye.txt");
        let eye = Mat::<C64>::from_fn(3, 3, |i, j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0));
        write_matrix_dump(eye.as_ref(), "site", &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "N 3 site");
        assert_eq!(lines.len(), 10);
        assert_eq!(lines[1], "0 0 1 0");
        assert_eq!(lines[2], "0 1 0 0");
        assert_eq!(lines[5], "1 1 1 0");
        assert_eq!(lines[9], "2 2 1 0");
    }

    #[test]
    fn dump_read_back_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        let m = Mat::<C64>::from_fn(5, 5, |i, j| {
            C64::new((i as f64 + 0.1).sqrt() / 7.0, ((j * 31 + i) as f64).sin() * 1e-9)
        });
        write_matrix_dump(m.as_ref(), "eigen-momentum", &path).unwrap();
        let (tag, back) = read_matrix_dump(&path).unwrap();
        assert_eq!(tag, "eigen-momentum");
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(back[(i, j)], m[(i, j)]);
            }
        }
    }

    #[test]
    fn truncated_dump_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "N 2 site\n0 0 1 0\n").unwrap();
        assert!(matches!(read_matrix_dump(&path), Err(HarnessError::Io { .. })));
    }

    #[test]
    fn missing_directory_names_the_path() {
        let err = write_records_csv(&[], Path::new("/nonexistent/dir/r.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/r.csv"));
        assert_eq!(err.exit_code(), 3);
    }
}
