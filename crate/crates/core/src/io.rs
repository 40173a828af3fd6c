//! Zero catalogs and report files: JSON with 17 significant digits, CSV export,
//! atomic writes.

use std::io::{self, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::error::{Error, Result};
use crate::census::LineSample;
use crate::locator::{RectBox, ZeroRecord};
use crate::trajectory::Trajectory;
use crate::types::{Kind, Params, PrecisionPolicy, SPoint};

pub const CATALOG_SCHEMA: &str = "lerchz.catalog.v1";
pub const TRAJECTORY_SCHEMA: &str = "lerchz.trajectory.v1";
pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Pretty JSON whose floats carry 17 significant digits (`1.4134725141734694e1`).
struct Digits17(PrettyFormatter<'static>);

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
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

/// Serializes any value as pretty JSON with 17-digit floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| Error::Format(e.to_string()))?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| Error::Format(e.to_string()))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

/// Seconds since the Unix epoch.
pub fn unix_timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Where a catalog came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogMeta {
    pub params: Params,
    #[serde(rename = "box")]
    pub rect: RectBox,
    pub kind: Kind,
    pub policy: PrecisionPolicy,
    pub timestamp: u64,
    /// The run configuration that produced the catalog.
    #[serde(default)]
    pub config: serde_json::Value,
}

/// A list of zeros with its provenance, sorted by `t` then `sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub schema: String,
    pub library_version: String,
    pub metadata: CatalogMeta,
    pub records: Vec<ZeroRecord>,
}

impl Catalog {
    pub fn new(
        params: Params,
        rect: RectBox,
        kind: Kind,
        policy: PrecisionPolicy,
        config: serde_json::Value,
        mut records: Vec<ZeroRecord>,
    ) -> Self {
        sort_records(&mut records);
        Catalog {
            schema: CATALOG_SCHEMA.to_string(),
            library_version: LIBRARY_VERSION.to_string(),
            metadata: CatalogMeta { params, rect, kind, policy, timestamp: unix_timestamp(), config },
            records,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let catalog: Catalog = from_json(text)?;
        if catalog.schema != CATALOG_SCHEMA {
            return Err(Error::Format(format!("schema {:?}, expected {CATALOG_SCHEMA:?}", catalog.schema)));
        }
        let sorted = catalog.records.windows(2).all(|w| record_order(&w[0], &w[1]).is_le());
        if !sorted {
            return Err(Error::Format("records are not sorted by t then sigma".into()));
        }
        Ok(catalog)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// One row per zero, with a header row.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["sigma", "t", "kind", "residual", "multiplicity", "refine_iters", "box_sigma_min", "box_sigma_max", "box_t_min", "box_t_max"])
            .map_err(csv_error)?;
        for r in &self.records {
            let p = &r.provenance;
            w.write_record([
                fmt17(r.location.sigma),
                fmt17(r.location.t),
                r.kind.to_string(),
                fmt17(r.residual),
                r.multiplicity.to_string(),
                r.refine_iters.to_string(),
                fmt17(p.sigma_min),
                fmt17(p.sigma_max),
                fmt17(p.t_min),
                fmt17(p.t_max),
            ])
            .map_err(csv_error)?;
        }
        finish_csv(w)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv()?.as_bytes())
    }
}

fn record_order(a: &ZeroRecord, b: &ZeroRecord) -> std::cmp::Ordering {
    a.location.t.total_cmp(&b.location.t).then(a.location.sigma.total_cmp(&b.location.sigma))
}

pub fn sort_records(records: &mut [ZeroRecord]) {
    records.sort_by(record_order);
}

/// `{:.16e}`, 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

/// `t, re_log_derivative, neg_log_t, half_neg_log_t, note` per scan row; skipped rows
/// leave the value empty.
pub fn line_scan_csv(rows: &[LineSample]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "re_log_derivative", "neg_log_t", "half_neg_log_t", "note"]).map_err(csv_error)?;
    for r in rows {
        w.write_record([
            fmt17(r.t),
            r.re_log_derivative.map(fmt17).unwrap_or_default(),
            fmt17(r.neg_log_t),
            fmt17(r.half_neg_log_t),
            r.note.clone().unwrap_or_default(),
        ])
        .map_err(csv_error)?;
    }
    finish_csv(w)
}

/// A traced trajectory with its crossings and, for a stopped trace, the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFile {
    pub schema: String,
    pub library_version: String,
    pub config: serde_json::Value,
    pub trajectory: Trajectory,
    pub crossings: Vec<Crossing>,
    /// `Some(reason)` when the trace stopped before the requested end.
    pub truncated: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub lambda: f64,
    pub position: SPoint,
}

impl TrajectoryFile {
    pub fn new(config: serde_json::Value, trajectory: Trajectory, crossings: &[(f64, SPoint)], truncated: Option<String>) -> Self {
        TrajectoryFile {
            schema: TRAJECTORY_SCHEMA.to_string(),
            library_version: LIBRARY_VERSION.to_string(),
            config,
            trajectory,
            crossings: crossings.iter().map(|&(lambda, position)| Crossing { lambda, position }).collect(),
            truncated,
        }
    }

    /// Plot data: `lambda, sigma, t, residual, note` per sample, crossings as extra
    /// rows noted `crossing`, and a final `TRUNCATED` row for a stopped trace.
    pub fn plot_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["lambda", "sigma", "t", "residual", "note"]).map_err(csv_error)?;
        for s in &self.trajectory.samples {
            w.write_record([fmt17(s.lambda), fmt17(s.position.sigma), fmt17(s.position.t), fmt17(s.residual), String::new()])
                .map_err(csv_error)?;
        }
        for c in &self.crossings {
            w.write_record([fmt17(c.lambda), fmt17(c.position.sigma), fmt17(c.position.t), String::new(), "crossing".into()])
                .map_err(csv_error)?;
        }
        if let Some(reason) = &self.truncated {
            w.write_record(["", "", "", "", &format!("TRUNCATED: {reason}")]).map_err(csv_error)?;
        }
        finish_csv(w)
    }
}
