//! CSV tables and the on-disk fragment cache.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::derived::{bounded_color_c, color_o, color_o_star};
use crate::error::{Error, Result};
use crate::metric::{delta, rho, DeltaLevel};
use crate::scheme_core::{export_fragment, fragment_to_json, import_fragment, Ordinal, SchemeHandle};

/// Environment variable naming the fragment cache directory.
pub const CACHE_ENV: &str = "SCHEME_FORGE_CACHE";

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn pairs(bound: u64) -> impl Iterator<Item = (Ordinal, Ordinal)> {
    (0..bound).flat_map(move |b| (0..b).map(move |a| (Ordinal::fin(a), Ordinal::fin(b))))
}

fn delta_cell(d: DeltaLevel) -> String {
    match d {
        DeltaLevel::Level(k) => k.to_string(),
        DeltaLevel::Infinity => "inf".into(),
    }
}

/// Rows `alpha,beta,rho,delta` for `α < β < bound`.
pub fn write_pair_metric_csv<W: Write>(h: &SchemeHandle, bound: u64, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "beta", "rho", "delta"]).map_err(csv_err)?;
    for (a, b) in pairs(bound) {
        let row = [
            a.to_string(),
            b.to_string(),
            rho(h, a, b)?.to_string(),
            delta_cell(delta(h, a, b)?),
        ];
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Rows `alpha,k,norm,xi` for `α < bound` and `k ≤ max_level`.
pub fn write_norm_csv<W: Write>(h: &SchemeHandle, bound: u64, max_level: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "k", "norm", "xi"]).map_err(csv_err)?;
    for a in (0..bound).map(Ordinal::fin) {
        for k in 0..=max_level {
            let row = [
                a.to_string(),
                k.to_string(),
                h.norm(a, k)?.to_string(),
                h.xi(a, k)?.to_string(),
            ];
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Rows `alpha,beta,o,o_star,c` for `α < β < bound`.
pub fn write_coloring_csv<W: Write>(h: &SchemeHandle, bound: u64, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "beta", "o", "o_star", "c"]).map_err(csv_err)?;
    for (a, b) in pairs(bound) {
        let row = [
            a.to_string(),
            b.to_string(),
            color_o(h, a, b)?.to_string(),
            color_o_star(h, a, b)?.value.to_string(),
            bounded_color_c(h, a, b)?.code.to_string(),
        ];
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Cache of exported fragments, one JSON file per type and bound.
#[derive(Debug, Clone)]
pub struct FragmentCache {
    dir: PathBuf,
}

impl FragmentCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FragmentCache { dir: dir.into() }
    }

    /// The cache named by `SCHEME_FORGE_CACHE`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, type_name: &str, bound: u64) -> PathBuf {
        self.dir.join(format!("{type_name}-{bound}.json"))
    }

    /// The fragment of `h` below `bound` as JSON, read from the cache when
    /// present and written to it otherwise.
    pub fn fragment_json(&self, h: &SchemeHandle, bound: u64) -> Result<String> {
        let name = h.ty().name().unwrap_or("custom");
        let path = self.path_for(name, bound);
        if let Ok(json) = std::fs::read_to_string(&path) {
            if import_fragment(&json).is_ok() {
                return Ok(json);
            }
        }
        let json = fragment_to_json(&export_fragment(h, bound)?)?;
        std::fs::create_dir_all(&self.dir)?;
        std::fs::write(&path, &json)?;
        Ok(json)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::type_system::{tau2, tau4};

    #[test]
    fn pair_table_has_a_row_per_pair() {
        let h = SchemeHandle::omega(&tau2());
        let mut buf = Vec::new();
        write_pair_metric_csv(&h, 6, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 15);
        assert!(text.lines().any(|l| l.starts_with("2,5,3,")));
    }

    #[test]
    fn coloring_table_reads_back() {
        let h = SchemeHandle::omega(&tau4());
        let mut buf = Vec::new();
        write_coloring_csv(&h, 5, &mut buf).unwrap();
        let mut r = csv::Reader::from_reader(buf.as_slice());
        assert_eq!(r.records().count(), 10);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = FragmentCache::new(dir.path());
        let h = SchemeHandle::omega(&tau2());
        let first = cache.fragment_json(&h, 10).unwrap();
        assert!(cache.path_for("tau2", 10).exists());
        assert_eq!(first, cache.fragment_json(&h, 10).unwrap());
    }
}
