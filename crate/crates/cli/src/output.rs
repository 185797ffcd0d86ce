//! Report artifacts: 17-significant-digit JSON, the per-probe scan CSV and a
//! plain-text summary, all staged in temporary files and renamed on success.

use crate::CliError;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use tempfile::NamedTempFile;
use weylspec::classifier::{Purity, SpectralReport};
use weylspec::nevanlinna::ImLimit;

pub const CSV_HEADER: [&str; 6] = ["x", "class", "residue_norm", "im_limit", "divergence_exponent", "probe_id"];

/// `v` with 17 significant digits (round-trip exact), exponent form.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "+inf".into()
    } else {
        "-inf".into()
    }
}

/// Pretty JSON whose floats always carry 17 significant digits.
struct Fixed17<'a>(PrettyFormatter<'a>);

impl Formatter for Fixed17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt17(v).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Io(format!("serialising report: {e}")))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| CliError::Io(e.to_string()))
}

/// One row per grid point and probe; undetermined points without evidence get
/// a single row with empty numeric fields.
pub fn scan_csv(report: &SpectralReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Io(format!("writing CSV: {e}"));
    w.write_record(CSV_HEADER).map_err(err)?;
    for p in &report.points {
        let x = fmt17(p.x);
        let class = p.class.tag.as_str();
        if p.class.evidence.is_empty() {
            w.write_record([x.as_str(), class, "", "", "", ""]).map_err(err)?;
            continue;
        }
        for e in &p.class.evidence {
            let im = match e.im_limit {
                ImLimit::Finite(v) => fmt17(v),
                ImLimit::PlusInfinity => "+inf".into(),
            };
            w.write_record([
                x.as_str(),
                class,
                &fmt17(e.residue_norm),
                &im,
                &fmt17(e.divergence_exponent),
                &e.probe_id,
            ])
            .map_err(err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(format!("writing CSV: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn intervals(list: &[(f64, f64)]) -> String {
    if list.is_empty() {
        return "none".into();
    }
    list.iter()
        .map(|(a, b)| format!("[{a:.6}, {b:.6}]"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn summary(report: &SpectralReport, purity: Purity) -> String {
    let p = &report.provenance;
    let mut s = String::new();
    let _ = writeln!(s, "provider      {} (dimension {})", p.provider_id, p.dim);
    let _ = writeln!(
        s,
        "interval      [{}, {}] step {} ({} points)",
        p.interval[0], p.interval[1], p.step, report.grid.count
    );
    let _ = writeln!(s, "probes        {}", p.probes.iter().map(|q| q.id.as_str()).collect::<Vec<_>>().join(", "));
    let _ = writeln!(s, "purity        {purity:?}");
    let _ = writeln!(s, "eigenvalues   {}", report.eigenvalues.len());
    for e in &report.eigenvalues {
        let _ = writeln!(
            s,
            "  x = {:<24} residue {:.3e}  rank {}  probe {}",
            fmt17(e.x),
            e.residue_norm,
            e.residue_rank,
            e.probe_id
        );
    }
    let _ = writeln!(s, "ac            {}", intervals(&report.ac_intervals));
    let _ = writeln!(s, "sc candidates {}", intervals(&report.sc_candidate_intervals));
    let _ = writeln!(s, "resolvent     {}", intervals(&report.resolvent_intervals));
    if report.undetermined_points > 0 {
        let _ = writeln!(s, "undetermined  {} points", report.undetermined_points);
    }
    let _ = writeln!(s, "note          interval sets are inner approximations limited by the probe family");
    s
}

/// Files written to temporaries in the target directory; nothing appears at
/// the final paths unless every artifact is complete.
pub struct Staged {
    dir: PathBuf,
    files: Vec<(NamedTempFile, PathBuf)>,
}

impl Staged {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn add(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let io_err = |e: io::Error| CliError::Io(format!("staging {name}: {e}"));
        let mut tmp = NamedTempFile::new_in(&self.dir).map_err(io_err)?;
        tmp.write_all(contents.as_bytes()).map_err(io_err)?;
        tmp.flush().map_err(io_err)?;
        self.files.push((tmp, self.dir.join(name)));
        Ok(())
    }

    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        let mut done = Vec::new();
        for (tmp, path) in self.files {
            tmp.persist(&path)
                .map_err(|e| CliError::Io(format!("writing {}: {}", path.display(), e.error)))?;
            done.push(path);
        }
        Ok(done)
    }
}
