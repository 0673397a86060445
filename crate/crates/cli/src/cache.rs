//! On-disk s_l cache keyed by (label, k, l).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use restrictia::restrict::SlEngine;
use restrictia::BigInt;

pub const ENV_VAR: &str = "RESTRICTIA_CACHE";

#[derive(Debug, Clone)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    /// `$RESTRICTIA_CACHE`, else `~/.cache/restrictia`, else the system temp dir.
    pub fn from_env() -> Self {
        let root = match std::env::var_os(ENV_VAR) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => match std::env::var_os("HOME") {
                Some(h) => Path::new(&h).join(".cache").join("restrictia"),
                None => std::env::temp_dir().join("restrictia-cache"),
            },
        };
        Cache { root }
    }

    fn path(&self, label: &str, k: u32, l: usize) -> PathBuf {
        self.root.join(sanitize(label)).join(format!("s_k{k}_l{l}"))
    }

    pub fn get(&self, label: &str, k: u32, l: usize) -> Option<BigInt> {
        let s = fs::read_to_string(self.path(label, k, l)).ok()?;
        BigInt::from_str(s.trim()).ok()
    }

    /// Writes to a temporary file in the target directory, then renames.
    pub fn put(&self, label: &str, k: u32, l: usize, v: &BigInt) -> Result<()> {
        let path = self.path(label, k, l);
        let dir = path.parent().expect("cache paths have a parent");
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let tmp = dir.join(format!(".s_k{k}_l{l}.{}.tmp", std::process::id()));
        {
            let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
            writeln!(f, "{v}")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path).with_context(|| format!("renaming into {}", path.display()))?;
        Ok(())
    }

    /// `[0, s_1, …, s_lmax]`, reading cached values and storing new ones.
    /// A failed cache write only costs recomputation later.
    pub fn s_values(&self, engine: &SlEngine, k: u32, lmax: usize) -> Result<Vec<BigInt>> {
        let label = engine.field().label().to_string();
        let mut out = vec![BigInt::from(0)];
        for l in 1..=lmax {
            let v = match self.get(&label, k, l) {
                Some(v) => v,
                None => {
                    let v = engine.s_l(k, l as i64)?;
                    if let Err(e) = self.put(&label, k, l, &v) {
                        eprintln!("warning[cache]: {e:#}");
                    }
                    v
                }
            };
            out.push(v);
        }
        Ok(out)
    }
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '_' { c } else { '_' })
        .collect()
}
