//! One JSON file per session. Writes go to a temporary file that is then
//! renamed over the old one.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::session::Session;

#[derive(Clone, Debug)]
pub struct Store {
    dir: PathBuf,
}

impl Store {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).with_context(|| format!("creating store directory {}", dir.display()))?;
        Ok(Store { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    pub fn save(&self, s: &Session) -> Result<()> {
        let path = self.path(&s.id);
        let tmp = self.dir.join(format!(".{}.json.tmp", s.id));
        let body = serde_json::to_vec_pretty(s)?;
        let mut f = fs::File::create(&tmp).with_context(|| format!("writing {}", tmp.display()))?;
        f.write_all(&body)?;
        f.sync_all()?;
        fs::rename(&tmp, &path).with_context(|| format!("renaming onto {}", path.display()))?;
        Ok(())
    }

    /// Every stored session, sorted by id.
    pub fn load_all(&self) -> Result<Vec<Session>> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            let is_doc = path.extension().is_some_and(|e| e == "json")
                && !path.file_name().is_some_and(|n| n.to_string_lossy().starts_with('.'));
            if !is_doc {
                continue;
            }
            let text = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
            let s: Session = serde_json::from_slice(&text).with_context(|| format!("parsing {}", path.display()))?;
            out.push(s);
        }
        out.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(out)
    }
}
