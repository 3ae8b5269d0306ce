//! Directory layout:
//!
//! ```text
//! <root>/vault.json
//! <root>/users.json
//! <root>/notifications.json
//! <root>/index/search.json
//! <root>/entries/<id>/master.meta
//! <root>/entries/<id>/variants/<variant>/variant.meta
//! <root>/entries/<id>/variants/<variant>/versions/<n>/meta
//! <root>/entries/<id>/variants/<variant>/versions/<n>/model.xml
//! ```
//!
//! Metadata files are pretty-printed JSON with a trailing newline; models
//! are canonical exchange XML. Every file is replaced atomically.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::access::Users;
use crate::discovery::SearchIndex;
use crate::error::{Error, Result};
use crate::exchange::{parse_model, serialize_model};
use crate::lifecycle::Notification;

use super::{
    Changes, Entry, EntryMaster, EntryVersion, IntegrityIssue, Variant, VaultConfig, VaultState,
    FORMAT_VERSION,
};

const CONFIG_FILE: &str = "vault.json";
const USERS_FILE: &str = "users.json";
const NOTIFICATIONS_FILE: &str = "notifications.json";
const ENTRIES_DIR: &str = "entries";
const INDEX_FILE: &str = "index/search.json";

fn entry_dir(root: &Path, id: &str) -> PathBuf {
    root.join(ENTRIES_DIR).join(id)
}

fn variant_dir(root: &Path, id: &str, variant: &str) -> PathBuf {
    entry_dir(root, id).join("variants").join(variant)
}

fn version_dir(root: &Path, id: &str, variant: &str, version: u32) -> PathBuf {
    variant_dir(root, id, variant)
        .join("versions")
        .join(version.to_string())
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("vault records serialize infallibly");
    bytes.push(b'\n');
    bytes
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = path
        .parent()
        .expect("vault files always have a parent directory");
    fs::create_dir_all(parent).map_err(|e| Error::storage(parent, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(parent).map_err(|e| Error::storage(parent, e))?;
    tmp.write_all(bytes).map_err(|e| Error::storage(path, e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| Error::storage(path, e))?;
    tmp.persist(path)
        .map_err(|e| Error::storage(path, e.error))?;
    if let Ok(dir) = fs::File::open(parent) {
        let _ = dir.sync_all();
    }
    Ok(())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(|e| Error::storage(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::storage(path, e))
}

pub(crate) fn exists(root: &Path) -> bool {
    root.join(CONFIG_FILE).is_file()
}

pub(crate) fn init(root: &Path, config: &VaultConfig) -> Result<()> {
    if exists(root) {
        return Err(Error::Conflict(format!(
            "{} already contains a vault",
            root.display()
        )));
    }
    if config.layers.is_empty() {
        return Err(Error::Validation(
            "at least one layer must be configured".into(),
        ));
    }
    fs::create_dir_all(root.join(ENTRIES_DIR)).map_err(|e| Error::storage(root, e))?;
    atomic_write(&root.join(USERS_FILE), &to_json(&Users::default()))?;
    atomic_write(
        &root.join(NOTIFICATIONS_FILE),
        &to_json(&Vec::<Notification>::new()),
    )?;
    atomic_write(&root.join(INDEX_FILE), &to_json(&SearchIndex::default()))?;
    // Written last: its presence marks a complete vault.
    atomic_write(&root.join(CONFIG_FILE), &to_json(config))
}

pub(crate) fn load(root: &Path) -> Result<VaultState> {
    let config_path = root.join(CONFIG_FILE);
    let config: VaultConfig = read_json(&config_path)?;
    if config.format_version > FORMAT_VERSION {
        return Err(Error::storage(
            config_path,
            format!(
                "format version {} is newer than supported {FORMAT_VERSION}",
                config.format_version
            ),
        ));
    }
    let users: Users = read_json(&root.join(USERS_FILE))?;
    let notifications: Vec<Notification> = read_json(&root.join(NOTIFICATIONS_FILE))?;

    let mut entries = BTreeMap::new();
    for dir in sorted_subdirs(&root.join(ENTRIES_DIR))? {
        let entry = load_entry(&dir)?;
        entries.insert(entry.master.id.clone(), Arc::new(entry));
    }

    Ok(VaultState {
        config,
        users,
        entries,
        notifications,
        index: Arc::new(SearchIndex::default()),
    })
}

fn sorted_subdirs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let read = match fs::read_dir(dir) {
        Ok(read) => read,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
        Err(e) => return Err(Error::storage(dir, e)),
    };
    for item in read {
        let item = item.map_err(|e| Error::storage(dir, e))?;
        if item
            .file_type()
            .map_err(|e| Error::storage(item.path(), e))?
            .is_dir()
        {
            out.push(item.path());
        }
    }
    out.sort();
    Ok(out)
}

fn dir_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn load_entry(dir: &Path) -> Result<Entry> {
    let master_path = dir.join("master.meta");
    let master: EntryMaster = read_json(&master_path)?;
    if master.id.as_str() != dir_name(dir) {
        return Err(Error::storage(
            master_path,
            format!("id {} does not match its directory", master.id),
        ));
    }

    let mut variants = Vec::new();
    for vdir in sorted_subdirs(&dir.join("variants"))? {
        let meta_path = vdir.join("variant.meta");
        let mut variant: Variant = read_json(&meta_path)?;
        if variant.variant_id != dir_name(&vdir) {
            return Err(Error::storage(
                meta_path,
                "variant id does not match its directory",
            ));
        }

        let mut numbered = Vec::new();
        for ndir in sorted_subdirs(&vdir.join("versions"))? {
            let n: u32 = dir_name(&ndir)
                .parse()
                .map_err(|_| Error::storage(&ndir, "version directory is not a number"))?;
            numbered.push((n, ndir));
        }
        numbered.sort();
        for (expected, (n, ndir)) in (1u32..).zip(numbered) {
            if n != expected {
                return Err(Error::storage(
                    &ndir,
                    format!("version {n} found where {expected} was expected"),
                ));
            }
            let meta_path = ndir.join("meta");
            let mut version: EntryVersion = read_json(&meta_path)?;
            if version.version_number != n {
                return Err(Error::storage(
                    meta_path,
                    "version number does not match its directory",
                ));
            }
            let model_path = ndir.join("model.xml");
            if model_path.exists() {
                let bytes = fs::read(&model_path).map_err(|e| Error::storage(&model_path, e))?;
                version.model =
                    Some(parse_model(&bytes).map_err(|e| Error::storage(&model_path, e))?);
            }
            variant.versions.push(version);
        }
        variants.push(variant);
    }
    sort_variants(&mut variants);
    Ok(Entry { master, variants })
}

/// Variants are kept in creation order.
pub(crate) fn sort_variants(variants: &mut [Variant]) {
    variants.sort_by(|a, b| (a.created_at, &a.variant_id).cmp(&(b.created_at, &b.variant_id)));
}

pub(crate) fn load_index(root: &Path) -> Option<SearchIndex> {
    let bytes = fs::read(root.join(INDEX_FILE)).ok()?;
    serde_json::from_slice(&bytes).ok()
}

pub(crate) fn write_index(root: &Path, index: &SearchIndex) -> Result<()> {
    atomic_write(&root.join(INDEX_FILE), &to_json(index))
}

fn model_bytes(version: &EntryVersion, path: &Path) -> Result<Option<Vec<u8>>> {
    version
        .model
        .as_ref()
        .map(|m| serialize_model(m).map_err(|e| Error::storage(path, e)))
        .transpose()
}

pub(crate) fn persist(root: &Path, state: &VaultState, changes: &Changes) -> Result<()> {
    for id in &changes.masters {
        let entry = &state.entries[id];
        atomic_write(
            &entry_dir(root, id.as_str()).join("master.meta"),
            &to_json(&entry.master),
        )?;
    }
    for (id, variant_id) in &changes.variants {
        let variant = state.entries[id]
            .variant(variant_id)
            .expect("changed variants exist in the committed state");
        atomic_write(
            &variant_dir(root, id.as_str(), variant_id).join("variant.meta"),
            &to_json(variant),
        )?;
    }
    for (r, model_changed) in &changes.versions {
        let version = state
            .version(r)
            .expect("changed versions exist in the committed state");
        let dir = version_dir(root, r.entry.as_str(), &r.variant, r.version);
        if *model_changed {
            let path = dir.join("model.xml");
            if let Some(bytes) = model_bytes(version, &path)? {
                atomic_write(&path, &bytes)?;
            }
        }
        atomic_write(&dir.join("meta"), &to_json(version))?;
    }
    if changes.users {
        atomic_write(&root.join(USERS_FILE), &to_json(&state.users))?;
    }
    if changes.notifications {
        atomic_write(
            &root.join(NOTIFICATIONS_FILE),
            &to_json(&state.notifications),
        )?;
    }
    if !changes.touched_entries().is_empty() {
        write_index(root, &state.index)?;
    }
    Ok(())
}

/// Compares every file on disk with the bytes the in-memory state would
/// produce.
pub(crate) fn verify_disk(root: &Path, state: &VaultState) -> Vec<IntegrityIssue> {
    let mut issues = Vec::new();
    let mut expect = |path: PathBuf, bytes: Vec<u8>| match fs::read(&path) {
        Ok(on_disk) if on_disk == bytes => {}
        Ok(_) => issues.push(IntegrityIssue::new(
            path.display(),
            "file differs from the committed state",
        )),
        Err(e) => issues.push(IntegrityIssue::new(path.display(), e)),
    };

    expect(root.join(CONFIG_FILE), to_json(&state.config));
    expect(root.join(USERS_FILE), to_json(&state.users));
    expect(root.join(NOTIFICATIONS_FILE), to_json(&state.notifications));
    expect(root.join(INDEX_FILE), to_json(&*state.index));
    for (id, entry) in &state.entries {
        expect(
            entry_dir(root, id.as_str()).join("master.meta"),
            to_json(&entry.master),
        );
        for variant in &entry.variants {
            expect(
                variant_dir(root, id.as_str(), &variant.variant_id).join("variant.meta"),
                to_json(variant),
            );
            for version in &variant.versions {
                let dir = version_dir(
                    root,
                    id.as_str(),
                    &variant.variant_id,
                    version.version_number,
                );
                expect(dir.join("meta"), to_json(version));
                if let Ok(Some(bytes)) = model_bytes(version, &dir) {
                    expect(dir.join("model.xml"), bytes);
                }
            }
        }
    }

    match sorted_subdirs(&root.join(ENTRIES_DIR)) {
        Ok(dirs) => {
            for dir in dirs {
                let name = dir_name(&dir);
                if !state.entries.keys().any(|id| id.as_str() == name) {
                    issues.push(IntegrityIssue::new(
                        dir.display(),
                        "entry directory is not part of the vault state",
                    ));
                }
            }
        }
        Err(e) => issues.push(IntegrityIssue::new(root.display(), e)),
    }
    issues
}
