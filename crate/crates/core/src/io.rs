//! Run artifacts and configuration files.
//!
//! A run directory holds `run.json` (resolved config echo, provenance and
//! verdict), `series.csv` (diagnostics in time, first column `t`), and
//! `fields/*.bin` snapshot dumps. `DONE` is written last; readers refuse
//! directories without it.
//!
//! Field dumps are a fixed header followed by `nx * ny` row-major `f64`
//! values (`iy * nx + ix`):
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | `KPIFIELD` |
//! | 8     | `u64` tag `0x0102030405060708`, in the file's byte order |
//! | 16    | `nx`, `ny` as `u64` |
//! | 24    | `Lx`, `Ly`, `t` as `f64` |
//!
//! The writer always emits little-endian; the reader accepts either order.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::experiments::{Experiment, ExperimentConfig, Outcome, Verdict};
use crate::spectral::{Field, Grid};
use crate::{Error, Result, CODE_VERSION};

pub const MANIFEST_FILE: &str = "run.json";
pub const SERIES_FILE: &str = "series.csv";
pub const FIELDS_DIR: &str = "fields";
pub const DONE_FILE: &str = "DONE";
pub const FIELD_MAGIC: [u8; 8] = *b"KPIFIELD";
pub const ENDIAN_TAG: u64 = 0x0102_0304_0506_0708;
const FIELD_HEADER_LEN: usize = 8 + 8 + 16 + 24;

/// Diagnostics sampled at strictly increasing times. Column 0 is `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Series {
    /// A series with columns `t` followed by `names`.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        let columns = std::iter::once("t".to_string()).chain(names.into_iter().map(Into::into)).collect();
        Series { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, t: f64, values: &[f64]) -> Result<()> {
        if values.len() + 1 != self.columns.len() {
            return Err(Error::InvalidArgument(format!(
                "series row has {} values, expected {}",
                values.len(),
                self.columns.len() - 1
            )));
        }
        if let Some(last) = self.rows.last() {
            if !(t > last[0]) {
                return Err(Error::InvalidArgument(format!("series time {t} does not exceed {}", last[0])));
            }
        }
        let mut row = Vec::with_capacity(self.columns.len());
        row.push(t);
        row.extend_from_slice(values);
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Header line, then one row per sample with 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Series> {
        let mut rd = csv::Reader::from_reader(r);
        let names: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
        if names.first().map(String::as_str) != Some("t") {
            return Err(Error::Artifact("series header must start with `t`".into()));
        }
        let mut s = Series { columns: names, rows: Vec::new() };
        for rec in rd.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|v| v.parse::<f64>().map_err(|e| Error::Artifact(format!("bad series value {v:?}: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            s.push(row[0], &row[1..])?;
        }
        Ok(s)
    }
}

/// Contents of `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub code_version: String,
    pub seed: Option<u64>,
    pub verdict: Verdict,
    pub series_columns: Vec<String>,
    pub fields: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunArtifact {
    pub manifest: Manifest,
    pub series: Series,
    pub snapshots: Vec<Field>,
}

impl RunArtifact {
    pub fn from_outcome(cfg: &ExperimentConfig, outcome: Outcome) -> Self {
        let manifest = Manifest {
            experiment: cfg.name,
            config: cfg.clone(),
            code_version: CODE_VERSION.to_string(),
            seed: cfg.seeds.first().copied(),
            verdict: outcome.verdict,
            series_columns: outcome.series.columns().to_vec(),
            fields: Vec::new(),
        };
        RunArtifact { manifest, series: outcome.series, snapshots: outcome.fields }
    }
}

pub fn write_field(path: &Path, u: &Field) -> Result<()> {
    let g = u.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&FIELD_MAGIC)?;
    w.write_all(&ENDIAN_TAG.to_le_bytes())?;
    for n in [g.nx() as u64, g.ny() as u64] {
        w.write_all(&n.to_le_bytes())?;
    }
    for v in [g.half_length_x(), g.half_length_y(), u.time()] {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in u.physical().iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<Field> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    let bad = |m: &str| Error::Artifact(format!("{}: {m}", path.display()));
    if bytes.len() < FIELD_HEADER_LEN || bytes[..8] != FIELD_MAGIC {
        return Err(bad("not a field dump"));
    }
    let word = |k: usize| -> [u8; 8] { bytes[k..k + 8].try_into().expect("8-byte slice") };
    let little = match u64::from_le_bytes(word(8)) {
        ENDIAN_TAG => true,
        t if t.swap_bytes() == ENDIAN_TAG => false,
        _ => return Err(bad("unrecognized endianness tag")),
    };
    let u64_at = |k| if little { u64::from_le_bytes(word(k)) } else { u64::from_be_bytes(word(k)) };
    let f64_at = |k| if little { f64::from_le_bytes(word(k)) } else { f64::from_be_bytes(word(k)) };
    let (nx, ny) = (u64_at(16) as usize, u64_at(24) as usize);
    let (lx, ly, t) = (f64_at(32), f64_at(40), f64_at(48));
    if bytes.len() != FIELD_HEADER_LEN + 8 * nx * ny {
        return Err(bad("payload length does not match the header"));
    }
    let values = (0..nx * ny).map(|i| f64_at(FIELD_HEADER_LEN + 8 * i)).collect();
    Field::from_physical(&Grid::new(nx, ny, lx, ly)?, values, t)
}

/// `dir` if it does not exist yet, otherwise the first free `dir-N`.
pub fn fresh_dir(dir: &Path) -> PathBuf {
    if !dir.exists() {
        return dir.to_path_buf();
    }
    let name = dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    (1..)
        .map(|n| dir.with_file_name(format!("{name}-{n}")))
        .find(|p| !p.exists())
        .expect("unbounded suffixes")
}

/// Writes the artifact into a new directory derived from `dir` (never
/// overwriting) and returns that directory. The manifest's verdict records
/// the final location.
pub fn write_artifact(artifact: &RunArtifact, dir: &Path) -> Result<PathBuf> {
    let out = fresh_dir(dir);
    fs::create_dir_all(out.join(FIELDS_DIR))?;
    let mut fields = Vec::with_capacity(artifact.snapshots.len());
    for (k, u) in artifact.snapshots.iter().enumerate() {
        let name = format!("{FIELDS_DIR}/{k:04}.bin");
        write_field(&out.join(&name), u)?;
        fields.push(name);
    }
    artifact.series.write_csv(BufWriter::new(File::create(out.join(SERIES_FILE))?))?;
    let mut manifest = artifact.manifest.clone();
    manifest.fields = fields;
    manifest.series_columns = artifact.series.columns().to_vec();
    manifest.verdict.artifact_path = Some(out.clone());
    let mut w = BufWriter::new(File::create(out.join(MANIFEST_FILE))?);
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    w.write_all(b"\n")?;
    w.flush()?;
    File::create(out.join(DONE_FILE))?.sync_all()?;
    Ok(out)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    if !dir.join(DONE_FILE).is_file() {
        return Err(Error::IncompleteRun(dir.to_path_buf()));
    }
    Ok(serde_json::from_reader(BufReader::new(File::open(dir.join(MANIFEST_FILE))?))?)
}

pub fn read_artifact(dir: &Path) -> Result<RunArtifact> {
    let manifest = read_manifest(dir)?;
    let series = Series::read_csv(BufReader::new(File::open(dir.join(SERIES_FILE))?))?;
    if series.columns() != manifest.series_columns.as_slice() {
        return Err(Error::Artifact("series header does not match the manifest".into()));
    }
    let snapshots = manifest
        .fields
        .iter()
        .map(|f| read_field(&dir.join(f)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunArtifact { manifest, series, snapshots })
}

/// Tables replaced wholesale rather than merged key by key: they are
/// tagged variants whose fields depend on `kind`.
const REPLACED_TABLES: [&str; 2] = ["initial", "control"];

fn merge(base: &mut toml::Table, user: toml::Table) {
    for (k, v) in user {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) if !REPLACED_TABLES.contains(&k.as_str()) => {
                merge(b, u)
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Parses a TOML config. Keys missing from the file take the defaults of
/// the experiment, which comes from `experiment` or the file's `name`.
pub fn parse_config_str(text: &str, experiment: Option<Experiment>) -> Result<ExperimentConfig> {
    // Typed pass over the file alone: names the offending key and line.
    toml::from_str::<ExperimentConfig>(text).map_err(|e| Error::Config(e.to_string()))?;
    let user: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    let named = match user.get("name") {
        Some(v) => Some(
            v.clone()
                .try_into::<Experiment>()
                .map_err(|e| Error::Config(format!("name: {e}")))?,
        ),
        None => None,
    };
    let name = match (experiment, named) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::Config(format!("config is for `{b}` but `{a}` was requested")));
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(Error::Config("no experiment named in the config or on the command line".into())),
    };
    let mut base = match toml::Value::try_from(ExperimentConfig::defaults(name)) {
        Ok(toml::Value::Table(t)) => t,
        _ => unreachable!("config serializes to a table"),
    };
    merge(&mut base, user);
    let cfg: ExperimentConfig =
        toml::Value::Table(base).try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path, experiment: Option<Experiment>) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    parse_config_str(&text, experiment).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// The resolved config as TOML, suitable for `parse_config`.
pub fn config_to_toml(cfg: &ExperimentConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_rejects_non_increasing_time() {
        let mut s = Series::new(["a"]);
        s.push(0.0, &[1.0]).unwrap();
        assert!(s.push(0.0, &[2.0]).is_err());
        assert!(s.push(1.0, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn csv_keeps_every_bit() {
        let mut s = Series::new(["a", "b"]);
        s.push(0.1, &[1.0 / 3.0, -f64::MIN_POSITIVE]).unwrap();
        s.push(0.2, &[f64::NAN, 1e300]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"t,a,b\n"));
        let r = Series::read_csv(buf.as_slice()).unwrap();
        assert_eq!(r.columns(), s.columns());
        for (x, y) in r.rows().iter().flatten().zip(s.rows().iter().flatten()) {
            assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
        }
    }

    #[test]
    fn merge_replaces_tagged_tables() {
        let mut base: toml::Table = "[initial]\nkind = 'line_soliton'\nc = 1.0\nx0 = 0.0\n[solver]\ndt = 1.0\nT = 2.0\n"
            .parse()
            .unwrap();
        let user: toml::Table = "[initial]\nkind = 'zero'\n[solver]\ndt = 0.5\n".parse().unwrap();
        merge(&mut base, user);
        assert_eq!(base["initial"].as_table().unwrap().len(), 1);
        assert_eq!(base["solver"]["T"].as_float(), Some(2.0));
        assert_eq!(base["solver"]["dt"].as_float(), Some(0.5));
    }
}
