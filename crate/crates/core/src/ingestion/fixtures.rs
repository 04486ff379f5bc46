//! Recorded source responses.
//!
//! Layout under the fixture root:
//!
//! ```text
//! <root>/manifest.json
//! <root>/<source_id>/<company_id>.<ext>
//! ```
//!
//! Each payload file holds one response exactly as the source returned it.
//! With [`WritePolicy::KeepPrevious`] an existing payload is moved aside to
//! `<company_id>.<n>.<ext>` before the new one is written; the default
//! overwrites in place.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreMode {
    Replay,
    Record,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WritePolicy {
    #[default]
    Overwrite,
    KeepPrevious,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellOrigin {
    /// Value fixed by a published figure.
    PaperAnchored,
    /// Filler constrained to match the published aggregates.
    Synthetic,
    /// Captured from a live source.
    Recorded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub source_id: String,
    pub company_id: String,
    pub path: String,
    pub origin: String,
    #[serde(default)]
    pub cells: BTreeMap<String, CellOrigin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn load(root: impl AsRef<Path>) -> Result<Self> {
        let path = root.as_ref().join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path.display(), e))
    }

    pub fn entry(&self, source_id: &str, company_id: &str) -> Option<&ManifestEntry> {
        self.entries
            .iter()
            .find(|e| e.source_id == source_id && e.company_id == company_id)
    }

    fn save(&self, root: &Path) -> Result<()> {
        let path = root.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}

#[derive(Debug)]
pub struct FixtureStore {
    root: PathBuf,
    mode: StoreMode,
    policy: WritePolicy,
    // serializes payload and manifest writes
    write_lock: Mutex<()>,
}

fn check_component(kind: &str, value: &str) -> Result<()> {
    let ok = !value.is_empty()
        && value != "."
        && value != ".."
        && !value.contains(['/', '\\'])
        && !value.contains('\0');
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{kind} {value:?} is not a valid fixture key"
        )))
    }
}

impl FixtureStore {
    /// Opens an existing fixture directory for replay.
    pub fn replay(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        if !root.is_dir() {
            return Err(Error::Config(format!(
                "fixture root {} does not exist",
                root.display()
            )));
        }
        Ok(FixtureStore {
            root,
            mode: StoreMode::Replay,
            policy: WritePolicy::default(),
            write_lock: Mutex::new(()),
        })
    }

    /// Opens (creating if needed) a fixture directory for recording.
    pub fn record(root: impl Into<PathBuf>, policy: WritePolicy) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(FixtureStore {
            root,
            mode: StoreMode::Record,
            policy,
            write_lock: Mutex::new(()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn mode(&self) -> StoreMode {
        self.mode
    }

    pub fn path_for(&self, source_id: &str, company_id: &str, extension: &str) -> PathBuf {
        self.root
            .join(source_id)
            .join(format!("{company_id}.{extension}"))
    }

    /// Recorded payload for a key, or `None` when nothing was recorded.
    pub fn load(
        &self,
        source_id: &str,
        company_id: &str,
        extension: &str,
    ) -> Result<Option<Vec<u8>>> {
        check_component("source id", source_id)?;
        check_component("company id", company_id)?;
        let path = self.path_for(source_id, company_id, extension);
        match std::fs::read(&path) {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    /// Stores `payload` verbatim and lists it in the manifest.
    pub fn save(
        &self,
        source_id: &str,
        company_id: &str,
        extension: &str,
        payload: &[u8],
    ) -> Result<PathBuf> {
        if self.mode != StoreMode::Record {
            return Err(Error::Config("fixture store is not in record mode".into()));
        }
        check_component("source id", source_id)?;
        check_component("company id", company_id)?;
        check_component("extension", extension)?;
        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());

        let dir = self.root.join(source_id);
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = self.path_for(source_id, company_id, extension);
        if self.policy == WritePolicy::KeepPrevious && path.exists() {
            let mut n = 1;
            let aside = loop {
                let candidate = dir.join(format!("{company_id}.{n}.{extension}"));
                if !candidate.exists() {
                    break candidate;
                }
                n += 1;
            };
            std::fs::rename(&path, &aside).map_err(|e| Error::io(&aside, e))?;
        }
        std::fs::write(&path, payload).map_err(|e| Error::io(&path, e))?;

        let mut manifest = match Manifest::load(&self.root) {
            Ok(m) => m,
            Err(Error::Io { source, .. }) if source.kind() == std::io::ErrorKind::NotFound => {
                Manifest {
                    label: "recorded".into(),
                    seed: None,
                    entries: Vec::new(),
                }
            }
            Err(e) => return Err(e),
        };
        let rel = format!("{source_id}/{company_id}.{extension}");
        manifest
            .entries
            .retain(|e| !(e.source_id == source_id && e.company_id == company_id));
        manifest.entries.push(ManifestEntry {
            source_id: source_id.into(),
            company_id: company_id.into(),
            path: rel,
            origin: "recorded".into(),
            cells: BTreeMap::new(),
        });
        manifest.entries.sort_by(|a, b| {
            (a.source_id.as_str(), a.company_id.as_str())
                .cmp(&(b.source_id.as_str(), b.company_id.as_str()))
        });
        manifest.save(&self.root)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn store_then_replay_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let store = FixtureStore::record(dir.path(), WritePolicy::Overwrite).unwrap();
        let payload = "{\"fb_likes\": 2747255, \"name\": \"TÜRK\"}\r\n\u{0}".as_bytes();
        let path = store.save("facebook", "TURKCELL", "json", payload).unwrap();
        assert_eq!(path, dir.path().join("facebook/TURKCELL.json"));
        assert_eq!(
            store.load("facebook", "TURKCELL", "json").unwrap().unwrap(),
            payload
        );

        let replay = FixtureStore::replay(dir.path()).unwrap();
        assert_eq!(
            replay
                .load("facebook", "TURKCELL", "json")
                .unwrap()
                .unwrap(),
            payload
        );

        let manifest = Manifest::load(dir.path()).unwrap();
        assert_eq!(manifest.entries.len(), 1);
        assert_eq!(manifest.entries[0].origin, "recorded");
    }

    #[test]
    fn overwrite_policy_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let store = FixtureStore::record(dir.path(), WritePolicy::Overwrite).unwrap();
        store.save("bing", "AKBANK", "json", b"1").unwrap();
        store.save("bing", "AKBANK", "json", b"2").unwrap();
        assert_eq!(store.load("bing", "AKBANK", "json").unwrap().unwrap(), b"2");
        assert_eq!(
            std::fs::read_dir(dir.path().join("bing")).unwrap().count(),
            1
        );
        assert_eq!(Manifest::load(dir.path()).unwrap().entries.len(), 1);
    }

    #[test]
    fn keep_previous_policy_versions() {
        let dir = tempfile::tempdir().unwrap();
        let store = FixtureStore::record(dir.path(), WritePolicy::KeepPrevious).unwrap();
        store.save("bing", "AKBANK", "json", b"1").unwrap();
        store.save("bing", "AKBANK", "json", b"2").unwrap();
        store.save("bing", "AKBANK", "json", b"3").unwrap();
        assert_eq!(store.load("bing", "AKBANK", "json").unwrap().unwrap(), b"3");
        assert_eq!(
            std::fs::read(dir.path().join("bing/AKBANK.1.json")).unwrap(),
            b"1"
        );
        assert_eq!(
            std::fs::read(dir.path().join("bing/AKBANK.2.json")).unwrap(),
            b"2"
        );
    }

    #[test]
    fn unknown_key_replays_as_none() {
        let dir = tempfile::tempdir().unwrap();
        let store = FixtureStore::replay(dir.path()).unwrap();
        assert_eq!(store.load("alexa", "NOBODY", "json").unwrap(), None);
    }

    #[test]
    fn replay_store_refuses_writes() {
        let dir = tempfile::tempdir().unwrap();
        let store = FixtureStore::replay(dir.path()).unwrap();
        assert!(matches!(
            store.save("a", "b", "json", b"x"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn missing_root_is_config_error() {
        assert!(matches!(
            FixtureStore::replay("/definitely/not/here"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn path_traversal_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let store = FixtureStore::record(dir.path(), WritePolicy::Overwrite).unwrap();
        assert!(store.save("..", "x", "json", b"").is_err());
        assert!(store.save("a", "../x", "json", b"").is_err());
    }

    #[test]
    fn io_failure_names_path() {
        let dir = tempfile::tempdir().unwrap();
        let store = FixtureStore::record(dir.path(), WritePolicy::Overwrite).unwrap();
        // a file where the source directory should be
        std::fs::write(dir.path().join("blocked"), b"").unwrap();
        let err = store.save("blocked", "X", "json", b"1").unwrap_err();
        assert!(err.is_io());
        assert!(err.to_string().contains("blocked"), "{err}");
    }
}
